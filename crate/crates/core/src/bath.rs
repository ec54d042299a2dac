//! Heat-bath models and the relaxation functions they induce.
//!
//! A discrete bath is a finite list of oscillator modes with frequency
//! `omega`, coupling `coupling` (K) and thermal occupation `occupation` (n).
//! Its memory enters the reduced dynamics through four time integrals of the
//! bath correlation functions,
//!
//! ```text
//! γ_{n+1}(t)  = Σ K²(n+1) (e^{-i(ω_ξ-ω)t} - 1) / (-i(ω_ξ-ω))
//! γ_n(t)      = Σ K² n    (e^{-i(ω_ξ-ω)t} - 1) / (-i(ω_ξ-ω))
//! γ̃_{n+1}(t)  = Σ K²(n+1) (e^{-i(ω_ξ+ω)t} - 1) / (-i(ω_ξ+ω))
//! γ̃_n(t)      = Σ K² n    (e^{-i(ω_ξ+ω)t} - 1) / (-i(ω_ξ+ω))
//! ```
//!
//! which combine into the pair (μ, ν) driving the cumulant equations:
//! `ν = γ_n* + γ̃_{n+1}`, `μ = γ_{n+1} + γ̃_n* − ν*`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Mean thermal occupation `1/(e^{ω/kT} − 1)`; zero at `kT = 0`.
pub fn bose_occupation(omega: f64, kt: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return domain(format!("bose_occupation needs omega > 0, got {omega}"));
    }
    if !(kt >= 0.0) {
        return domain(format!("bose_occupation needs kT >= 0, got {kt}"));
    }
    if kt == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / kt).exp_m1())
}

/// One environmental oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    pub omega: f64,
    pub coupling: f64,
    pub occupation: f64,
}

/// Bath description paired with a system oscillator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathModel {
    /// Markovian phase-sensitive bath with amplitude decay rate `gamma`.
    LinearMarkov { gamma: f64, nbar: f64 },
    /// Two-quantum bath resonant with 2ω; `gamma` is the pair-exchange rate.
    QuadraticMarkov { gamma: f64, nbar: f64 },
    /// Earliest stage, before the bath memory decays: μ = 0, ν = Γ₀ t.
    EarlyTime { gamma0: f64 },
    /// Explicit finite set of modes.
    DiscreteModes { modes: Vec<BathMode> },
}

impl BathModel {
    /// Check the physical invariants against the system frequency.
    pub fn validate(&self, system_omega: f64) -> Result<()> {
        if !(system_omega > 0.0) {
            return Err(Error::Config(format!("system omega must be > 0, got {system_omega}")));
        }
        match self {
            BathModel::LinearMarkov { gamma, nbar } => {
                nonneg("gamma", *gamma)?;
                nonneg("nbar", *nbar)?;
                if *gamma >= system_omega {
                    return Err(Error::Config(format!(
                        "linear Markov bath needs gamma < omega (underdamped), got gamma = {gamma}, omega = {system_omega}"
                    )));
                }
            }
            BathModel::QuadraticMarkov { gamma, nbar } => {
                nonneg("gamma", *gamma)?;
                nonneg("nbar", *nbar)?;
            }
            BathModel::EarlyTime { gamma0 } => nonneg("gamma0", *gamma0)?,
            BathModel::DiscreteModes { modes } => {
                if modes.is_empty() {
                    return Err(Error::Config("discrete bath has no modes".into()));
                }
                for m in modes {
                    if !(m.omega > 0.0) {
                        return Err(Error::Config(format!("mode frequency must be > 0, got {}", m.omega)));
                    }
                    nonneg("coupling", m.coupling)?;
                    nonneg("occupation", m.occupation)?;
                }
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BathModel::LinearMarkov { .. } => "linear_markov",
            BathModel::QuadraticMarkov { .. } => "quadratic_markov",
            BathModel::EarlyTime { .. } => "early_time",
            BathModel::DiscreteModes { .. } => "discrete_modes",
        }
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// The four memory integrals of a discrete bath at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFunctions {
    pub gamma_n: Complex64,
    pub gamma_n1: Complex64,
    pub tilde_n: Complex64,
    pub tilde_n1: Complex64,
}

/// `∫₀ᵗ e^{-iΔτ} dτ`, written as `t·sinc(Δt/2)·e^{-iΔt/2}` so that it stays
/// accurate near resonance.
fn memory_kernel(detuning: f64, t: f64) -> Complex64 {
    let half = 0.5 * detuning * t;
    let phase = Complex64::from_polar(1.0, -half);
    if (detuning * t).abs() < 1e-6 {
        return phase * t;
    }
    phase * (2.0 * half.sin() / detuning)
}

/// Evaluate γ_n, γ_{n+1}, γ̃_n, γ̃_{n+1} for a mode list at time `t ≥ 0`.
pub fn gamma_functions(modes: &[BathMode], system_omega: f64, t: f64) -> GammaFunctions {
    let mut out = GammaFunctions {
        gamma_n: Complex64::new(0.0, 0.0),
        gamma_n1: Complex64::new(0.0, 0.0),
        tilde_n: Complex64::new(0.0, 0.0),
        tilde_n1: Complex64::new(0.0, 0.0),
    };
    for m in modes {
        let k2 = m.coupling * m.coupling;
        let near = memory_kernel(m.omega - system_omega, t);
        let far = memory_kernel(m.omega + system_omega, t);
        out.gamma_n += near * (k2 * m.occupation);
        out.gamma_n1 += near * (k2 * (m.occupation + 1.0));
        out.tilde_n += far * (k2 * m.occupation);
        out.tilde_n1 += far * (k2 * (m.occupation + 1.0));
    }
    out
}

/// Γ₀ = Σ K²(2n+1), the early-stage diffusion constant of a mode list.
pub fn early_time_constant(modes: &[BathMode]) -> f64 {
    modes
        .iter()
        .map(|m| m.coupling * m.coupling * (2.0 * m.occupation + 1.0))
        .sum()
}

/// Bath correlation time estimated as 1/Δω from the spread of mode frequencies.
pub fn correlation_time(modes: &[BathMode]) -> Option<f64> {
    let lo = modes.iter().map(|m| m.omega).fold(f64::INFINITY, f64::min);
    let hi = modes.iter().map(|m| m.omega).fold(f64::NEG_INFINITY, f64::max);
    let width = hi - lo;
    (width > 0.0).then(|| 1.0 / width)
}

/// Evenly spaced comb of `count` modes on `[center − half_width, center + half_width]`
/// with equal coupling and occupations from `occupation(ω)`.
pub fn frequency_comb(
    center: f64,
    half_width: f64,
    count: usize,
    coupling: f64,
    mut occupation: impl FnMut(f64) -> f64,
) -> Vec<BathMode> {
    assert!(count >= 2, "a comb needs at least two modes");
    let step = 2.0 * half_width / (count - 1) as f64;
    (0..count)
        .map(|i| {
            let omega = center - half_width + step * i as f64;
            BathMode { omega, coupling, occupation: occupation(omega) }
        })
        .collect()
}

/// Relaxation functions (μ(t), ν(t)) for the cumulant and linear Fock solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum RelaxationCoefficients {
    Constant { mu: Complex64, nu: Complex64 },
    /// μ = 0, ν = `rate`·t.
    LinearRamp { rate: f64 },
    Modes { modes: Vec<BathMode>, system_omega: f64 },
}

impl RelaxationCoefficients {
    /// Returns `(μ(t), ν(t))`.
    pub fn at(&self, t: f64) -> (Complex64, Complex64) {
        match self {
            RelaxationCoefficients::Constant { mu, nu } => (*mu, *nu),
            RelaxationCoefficients::LinearRamp { rate } => {
                (Complex64::new(0.0, 0.0), Complex64::new(rate * t, 0.0))
            }
            RelaxationCoefficients::Modes { modes, system_omega } => {
                let g = gamma_functions(modes, *system_omega, t);
                let nu = g.gamma_n.conj() + g.tilde_n1;
                let mu = g.gamma_n1 + g.tilde_n.conj() - nu.conj();
                (mu, nu)
            }
        }
    }

    pub fn mu(&self, t: f64) -> Complex64 {
        self.at(t).0
    }

    pub fn nu(&self, t: f64) -> Complex64 {
        self.at(t).1
    }

    pub fn is_time_dependent(&self) -> bool {
        !matches!(self, RelaxationCoefficients::Constant { .. })
    }
}

/// Map a bath onto its relaxation functions. The two-quantum bath has no
/// Gaussian (cumulant) description and is rejected.
pub fn relaxation_coefficients(bath: &BathModel, system_omega: f64) -> Result<RelaxationCoefficients> {
    bath.validate(system_omega)?;
    match bath {
        BathModel::LinearMarkov { gamma, nbar } => Ok(RelaxationCoefficients::Constant {
            mu: Complex64::new(*gamma, 0.0),
            nu: Complex64::new(gamma * nbar, 0.0),
        }),
        BathModel::EarlyTime { gamma0 } => Ok(RelaxationCoefficients::LinearRamp { rate: *gamma0 }),
        BathModel::DiscreteModes { modes } => Ok(RelaxationCoefficients::Modes {
            modes: modes.clone(),
            system_omega,
        }),
        BathModel::QuadraticMarkov { .. } => Err(Error::Config(
            "the two-quantum bath has no cumulant description; use a Fock quadratic dissipator".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn occupation_reference_values() {
        let kt = 2.0 / 3f64.ln();
        assert_relative_eq!(bose_occupation(2.0, kt).unwrap(), 0.5, epsilon = 1e-14);
        let n1 = bose_occupation(1.0, kt).unwrap();
        assert_relative_eq!(n1, 1.0 / (3f64.sqrt() - 1.0), epsilon = 1e-13);
        assert!((n1 - 1.36).abs() < 0.01);
        assert_eq!(bose_occupation(1.0, 0.0).unwrap(), 0.0);
        assert!(bose_occupation(0.0, 1.0).is_err());
        assert!(bose_occupation(-1.0, 1.0).is_err());
    }

    #[test]
    fn gamma_functions_vanish_at_zero() {
        let modes = vec![BathMode { omega: 1.3, coupling: 0.2, occupation: 0.7 }];
        let g = gamma_functions(&modes, 1.0, 0.0);
        assert_eq!(g.gamma_n.norm(), 0.0);
        assert_eq!(g.gamma_n1.norm(), 0.0);
        assert_eq!(g.tilde_n.norm(), 0.0);
        assert_eq!(g.tilde_n1.norm(), 0.0);
    }

    #[test]
    fn resonant_mode_grows_linearly() {
        let (k, n) = (0.3, 1.5);
        let modes = vec![BathMode { omega: 1.0, coupling: k, occupation: n }];
        for t in [0.1, 1.0, 7.5] {
            let g = gamma_functions(&modes, 1.0, t);
            assert_relative_eq!(g.gamma_n1.re, k * k * (n + 1.0) * t, epsilon = 1e-14);
            assert_eq!(g.gamma_n1.im, 0.0);
        }
    }

    #[test]
    fn near_resonance_is_continuous() {
        let t = 3.0;
        // straddle the switch between the resonant limit and the sinc form
        let a = memory_kernel(0.999e-6 / t, t);
        let b = memory_kernel(1.001e-6 / t, t);
        assert!((a - b).norm() < 1e-8, "{}", (a - b).norm());
    }

    #[test]
    fn markov_and_early_coefficients() {
        let c = relaxation_coefficients(&BathModel::LinearMarkov { gamma: 0.1, nbar: 2.5277 }, 1.0).unwrap();
        for t in [0.0, 1.0, 100.0] {
            let (mu, nu) = c.at(t);
            assert_eq!(mu, Complex64::new(0.1, 0.0));
            assert_relative_eq!(nu.re, 0.25277, epsilon = 1e-15);
        }
        let e = relaxation_coefficients(&BathModel::EarlyTime { gamma0: 0.3 }, 1.0).unwrap();
        let (mu, nu) = e.at(2.0);
        assert_eq!(mu.norm(), 0.0);
        assert_relative_eq!(nu.re, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn quadratic_bath_has_no_cumulant_route() {
        let r = relaxation_coefficients(&BathModel::QuadraticMarkov { gamma: 0.5, nbar: 0.0 }, 1.0);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn validation_rejects_bad_baths() {
        assert!(BathModel::LinearMarkov { gamma: 1.0, nbar: 0.0 }.validate(1.0).is_err());
        assert!(BathModel::LinearMarkov { gamma: -0.1, nbar: 0.0 }.validate(1.0).is_err());
        assert!(BathModel::DiscreteModes { modes: vec![] }.validate(1.0).is_err());
        let bad = BathMode { omega: 0.0, coupling: 0.1, occupation: 0.0 };
        assert!(BathModel::DiscreteModes { modes: vec![bad] }.validate(1.0).is_err());
        assert!(BathModel::EarlyTime { gamma0: 0.2 }.validate(1.0).is_ok());
    }

    #[test]
    fn small_time_nu_slope_is_early_constant() {
        let modes = frequency_comb(1.0, 0.9, 201, 0.02, |w| bose_occupation(w, 1.0).unwrap());
        let tau_c = correlation_time(&modes).unwrap();
        let gamma0 = early_time_constant(&modes);
        let c = RelaxationCoefficients::Modes { modes, system_omega: 1.0 };
        let t = 0.01 * tau_c;
        let nu = c.nu(t);
        assert!((nu.re / t - gamma0).abs() / gamma0 < 0.01);
        assert!(c.mu(t).norm() / (gamma0 * t) < 0.01);
    }
}
