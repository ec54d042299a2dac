//! Second-order cumulant dynamics of Gaussian branches.
//!
//! The normally ordered characteristic function of each branch is kept as
//! `exp(K10 λ − K01 λ* − K11 λλ* + K20 λ² + K02 λ*²)`. Its first cumulants
//! carry the branch center `K10 + K01` and the second cumulants the width
//! `V = 1/2 + K11 + K20 + K02` (so that Var Q = 2V for diagonal branches).
//!
//! The equations of motion are linear, so a superposition of coherent states
//! evolves branch by branch with constant weights.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::RelaxationCoefficients;
use crate::error::{domain, Error, Result};
use crate::ode::{self, System, Tolerances};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Cumulants of one `(α, β)` branch at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchCumulants {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub k10: Complex64,
    pub k01: Complex64,
    pub k11: Complex64,
    pub k20: Complex64,
    pub k02: Complex64,
}

impl BranchCumulants {
    /// Initial cumulants of the `(α, β)` kernel: `K10 = α`, `K01 = β`, rest zero.
    pub fn initial(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta, k10: alpha, k01: beta, k11: ZERO, k20: ZERO, k02: ZERO }
    }

    /// Diagonal branch of the coherent state |α₀⟩.
    pub fn coherent(alpha0: Complex64) -> Self {
        Self::initial(alpha0.conj(), alpha0)
    }

    /// Branch center `K10 + K01`; purely imaginary for the cat off-diagonal branches
    /// of a real amplitude.
    pub fn center(&self) -> Complex64 {
        self.k10 + self.k01
    }

    /// Width parameter `V = 1/2 + K11 + K20 + K02`.
    pub fn variance(&self) -> Complex64 {
        Complex64::new(0.5, 0.0) + self.k11 + self.k20 + self.k02
    }

    /// True for the branches describing a physical density (`β = α*`).
    pub fn is_diagonal(&self) -> bool {
        (self.beta - self.alpha.conj()).norm() <= 1e-14 * (1.0 + self.alpha.norm())
    }

    fn to_state(self) -> [Complex64; 5] {
        [self.k10, self.k01, self.k11, self.k20, self.k02]
    }

    fn with_state(self, y: &[Complex64]) -> Self {
        Self { k10: y[0], k01: y[1], k11: y[2], k20: y[3], k02: y[4], ..self }
    }
}

/// One branch of a superposition with its constant complex weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedBranch {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub weight: Complex64,
}

/// Finite weighted sum of Gaussian `(α, β)` kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionState {
    pub branches: Vec<WeightedBranch>,
}

impl SuperpositionState {
    pub fn coherent(alpha0: Complex64) -> Self {
        Self {
            branches: vec![WeightedBranch { alpha: alpha0.conj(), beta: alpha0, weight: Complex64::new(1.0, 0.0) }],
        }
    }

    /// Sum of diagonal weights; one for a normalized state.
    pub fn diagonal_weight(&self) -> Complex64 {
        self.branches
            .iter()
            .filter(|b| BranchCumulants::initial(b.alpha, b.beta).is_diagonal())
            .map(|b| b.weight)
            .sum()
    }
}

/// `N² = 2 + 2 cos φ e^{−2|α|²}` for the cat `N⁻¹(|α⟩ + e^{iφ}|−α⟩)`.
pub fn cat_norm_squared(alpha: Complex64, phi: f64) -> f64 {
    2.0 + 2.0 * phi.cos() * (-2.0 * alpha.norm_sqr()).exp()
}

/// Four-branch representation of the cat `N⁻¹(|α⟩ + e^{iφ}|−α⟩)`.
pub fn make_cat(alpha: Complex64, phi: f64) -> Result<SuperpositionState> {
    if !(alpha.norm() > 0.0) {
        return domain("cat state needs |alpha| > 0");
    }
    let n2 = cat_norm_squared(alpha, phi);
    let overlap = (-2.0 * alpha.norm_sqr()).exp();
    let one = Complex64::new(1.0 / n2, 0.0);
    let coh = Complex64::from_polar(overlap / n2, phi);
    let a = alpha.conj();
    Ok(SuperpositionState {
        branches: vec![
            WeightedBranch { alpha: a, beta: alpha, weight: one },
            WeightedBranch { alpha: -a, beta: -alpha, weight: one },
            WeightedBranch { alpha: a, beta: -alpha, weight: coh },
            WeightedBranch { alpha: -a, beta: alpha, weight: coh.conj() },
        ],
    })
}

struct CumulantSystem<'a> {
    coeffs: &'a RelaxationCoefficients,
    omega: f64,
}

impl System for CumulantSystem<'_> {
    fn rhs(&mut self, t: f64, y: &[Complex64], dy: &mut [Complex64]) -> Result<()> {
        let (mu, nu) = self.coeffs.at(t);
        let iw = I * self.omega;
        let [k10, k01, k11, k20, k02] = [y[0], y[1], y[2], y[3], y[4]];
        dy[0] = (iw - mu.conj()) * k10 + mu * k01;
        dy[1] = -(iw + mu) * k01 + mu.conj() * k10;
        dy[2] = 2.0 * nu.re - 2.0 * mu.re * k11 + 2.0 * mu * k02 + 2.0 * mu.conj() * k20;
        dy[3] = -nu.conj() + mu * k11 + 2.0 * (iw - mu.conj()) * k20;
        // mirror image of the K20 equation under conjugation
        dy[4] = -nu + mu.conj() * k11 - 2.0 * (iw + mu) * k02;
        Ok(())
    }
}

/// Integration tolerances for the cumulant equations.
pub fn default_tolerances() -> Tolerances {
    Tolerances { rtol: 1e-10, atol: 1e-12, initial_step: 1e-3, max_steps: 5_000_000 }
}

/// Integrate one branch over a strictly increasing grid starting at 0.
pub fn evolve_cumulants(
    initial: BranchCumulants,
    coeffs: &RelaxationCoefficients,
    omega: f64,
    times: &[f64],
) -> Result<Vec<BranchCumulants>> {
    evolve_cumulants_with(initial, coeffs, omega, times, default_tolerances())
}

pub fn evolve_cumulants_with(
    initial: BranchCumulants,
    coeffs: &RelaxationCoefficients,
    omega: f64,
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<BranchCumulants>> {
    if times.first() != Some(&0.0) {
        return domain("cumulant time grid must start at t = 0");
    }
    let mut out = Vec::with_capacity(times.len());
    let mut sys = CumulantSystem { coeffs, omega };
    ode::dormand_prince(&mut sys, &initial.to_state(), times, tol, |_, _, y| {
        out.push(initial.with_state(y));
    })?;
    Ok(out)
}

/// Per-branch trajectories of an evolved superposition.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedSuperposition {
    pub times: Vec<f64>,
    pub weights: Vec<Complex64>,
    /// `trajectories[b][i]` is branch `b` at `times[i]`.
    pub trajectories: Vec<Vec<BranchCumulants>>,
}

impl EvolvedSuperposition {
    /// `(weight, cumulants)` of every branch at grid index `i`.
    pub fn at(&self, i: usize) -> impl Iterator<Item = (Complex64, &BranchCumulants)> + '_ {
        self.weights.iter().copied().zip(self.trajectories.iter().map(move |tr| &tr[i]))
    }
}

/// Evolve every branch of `state` independently.
pub fn evolve_superposition(
    state: &SuperpositionState,
    coeffs: &RelaxationCoefficients,
    omega: f64,
    times: &[f64],
) -> Result<EvolvedSuperposition> {
    let trajectories = state
        .branches
        .iter()
        .map(|b| evolve_cumulants(BranchCumulants::initial(b.alpha, b.beta), coeffs, omega, times))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvolvedSuperposition {
        times: times.to_vec(),
        weights: state.branches.iter().map(|b| b.weight).collect(),
        trajectories,
    })
}

/// Markovian phase-sensitive bath parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovParams {
    pub omega: f64,
    pub gamma: f64,
    pub nbar: f64,
}

impl MarkovParams {
    pub fn new(omega: f64, gamma: f64, nbar: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return domain(format!("omega must be > 0, got {omega}"));
        }
        if !(gamma >= 0.0) || !(nbar >= 0.0) {
            return domain("gamma and nbar must be >= 0");
        }
        if gamma >= omega {
            return domain(format!("overdamped regime (gamma = {gamma} >= omega = {omega}) is not supported"));
        }
        Ok(Self { omega, gamma, nbar })
    }

    /// ω̃ = √(ω² − γ²).
    pub fn effective_frequency(&self) -> f64 {
        (self.omega * self.omega - self.gamma * self.gamma).sqrt()
    }

    /// `z(t) = cos ω̃t + (γ/ω̃) sin ω̃t + i (ω/ω̃) sin ω̃t`.
    pub fn z(&self, t: f64) -> Complex64 {
        let wt = self.effective_frequency();
        let (s, c) = (wt * t).sin_cos();
        Complex64::new(c + self.gamma / wt * s, self.omega / wt * s)
    }

    /// Closed-form width `V(t)` of a coherent branch.
    pub fn variance(&self, t: f64) -> f64 {
        let wt = self.effective_frequency();
        let r = self.gamma / wt;
        let (s2, c2) = (2.0 * wt * t).sin_cos();
        0.5 + self.nbar - self.nbar * (-2.0 * self.gamma * t).exp() * (1.0 + r * r * (1.0 - c2) + r * s2)
    }

    /// Relaxation functions matching this bath: μ = γ, ν = γ n.
    pub fn coefficients(&self) -> RelaxationCoefficients {
        RelaxationCoefficients::Constant {
            mu: Complex64::new(self.gamma, 0.0),
            nu: Complex64::new(self.gamma * self.nbar, 0.0),
        }
    }

    /// Oscillation period 2π/ω̃.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.effective_frequency()
    }
}

/// Closed-form Markovian mean position, width and `z(t)` for a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovSolution {
    pub q: f64,
    pub v: f64,
    pub z: Complex64,
}

/// Markovian solution for the coherent state |α₀⟩.
///
/// The mean is `2 Re(α₀* z(t)) e^{−γt}`; for real α₀ this is the familiar
/// `2 Re(α₀ z(t)) e^{−γt}`, and the conjugate keeps complex amplitudes
/// consistent with the free evolution `2 Re(α₀ e^{−iωt})`.
pub fn analytic_markov(alpha0: Complex64, gamma: f64, omega: f64, nbar: f64, t: f64) -> Result<MarkovSolution> {
    let p = MarkovParams::new(omega, gamma, nbar)?;
    let z = p.z(t);
    Ok(MarkovSolution {
        q: 2.0 * (alpha0.conj() * z).re * (-gamma * t).exp(),
        v: p.variance(t),
        z,
    })
}

/// Early-stage kinematics: undamped mean and quadratic broadening `1/2 + Γ₀t²`.
pub fn early_time(alpha0: Complex64, gamma0: f64, omega: f64, t: f64) -> (f64, f64) {
    let q = 2.0 * (alpha0 * Complex64::from_polar(1.0, -omega * t)).re;
    (q, 0.5 + gamma0 * t * t)
}

pub(crate) fn require_gaussian(label: &str) -> Error {
    Error::Config(format!("{label} is not a Gaussian state; the cumulant solver only accepts coherent branches"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize, t_end: f64) -> Vec<f64> {
        (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn free_evolution_rotates_first_cumulants() {
        let coeffs = RelaxationCoefficients::Constant { mu: ZERO, nu: ZERO };
        let alpha = 1.7;
        let times = grid(30, 12.0);
        let tr = evolve_cumulants(BranchCumulants::initial(c(alpha), c(alpha)), &coeffs, 1.0, &times).unwrap();
        for (t, k) in times.iter().zip(&tr) {
            assert!((k.k10 - Complex64::from_polar(alpha, *t)).norm() < 1e-9);
            assert!((k.k01 - Complex64::from_polar(alpha, -*t)).norm() < 1e-9);
            assert_eq!(k.k11, ZERO);
            assert_eq!(k.k20, ZERO);
            assert_eq!(k.k02, ZERO);
        }
    }

    #[test]
    fn markov_trajectory_matches_closed_form() {
        let nbar = crate::bath::bose_occupation(1.0, 3.0).unwrap();
        let p = MarkovParams::new(1.0, 0.1, nbar).unwrap();
        let times = grid(200, 5.0 * p.period());
        let alpha0 = c(2.0);
        let tr = evolve_cumulants(BranchCumulants::coherent(alpha0), &p.coefficients(), 1.0, &times).unwrap();
        for (t, k) in times.iter().zip(&tr) {
            let exact = analytic_markov(alpha0, 0.1, 1.0, nbar, *t).unwrap();
            assert!((k.center().re - exact.q).abs() < 1e-8);
            assert!((k.variance().re - exact.v).abs() < 1e-8);
        }
    }

    #[test]
    fn complex_amplitude_closed_form_follows_the_ode() {
        let p = MarkovParams::new(1.0, 0.2, 0.3).unwrap();
        let alpha0 = Complex64::new(0.8, -1.1);
        let times = grid(80, 3.0 * p.period());
        let tr = evolve_cumulants(BranchCumulants::coherent(alpha0), &p.coefficients(), 1.0, &times).unwrap();
        for (t, k) in times.iter().zip(&tr) {
            let exact = analytic_markov(alpha0, p.gamma, 1.0, p.nbar, *t).unwrap();
            assert!((k.center().re - exact.q).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn analytic_limits() {
        let s = analytic_markov(Complex64::new(1.5, 0.4), 0.2, 1.0, 0.7, 0.0).unwrap();
        assert_relative_eq!(s.q, 3.0, epsilon = 1e-14);
        assert_relative_eq!(s.v, 0.5, epsilon = 1e-14);
        assert_relative_eq!(s.z.re, 1.0, epsilon = 1e-14);
        let late = analytic_markov(c(1.0), 0.2, 1.0, 0.7, 200.0).unwrap();
        assert_relative_eq!(late.v, 1.2, epsilon = 1e-12);
        let p = MarkovParams::new(1.0, 0.25, 0.0).unwrap();
        assert_relative_eq!(p.effective_frequency(), 0.9375f64.sqrt(), epsilon = 1e-15);
        assert!((p.effective_frequency() - 0.96825).abs() < 1e-5);
        assert!(analytic_markov(c(1.0), 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(analytic_markov(c(1.0), 1.5, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn early_time_kinematics() {
        assert_eq!(early_time(c(2.0), 0.3, 1.0, 0.0), (4.0, 0.5));
        let (q, v) = early_time(c(2.0), 0.3, 1.0, PI);
        assert_relative_eq!(q, -4.0, epsilon = 1e-12);
        assert_relative_eq!(v, 0.5 + 0.3 * PI * PI, epsilon = 1e-12);
    }

    #[test]
    fn cat_normalization() {
        let a = c(2.0);
        assert_relative_eq!(cat_norm_squared(a, PI / 2.0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(cat_norm_squared(a, 0.0), 2.0 + 2.0 * (-8.0f64).exp(), epsilon = 1e-15);
        let s = make_cat(a, 0.0).unwrap();
        assert_eq!(s.branches.len(), 4);
        assert_relative_eq!(s.diagonal_weight().re * cat_norm_squared(a, 0.0), 2.0, epsilon = 1e-14);
        let big = make_cat(c(6.0), 0.3).unwrap();
        assert!(big.branches[2].weight.norm() < 1e-30);
        assert_eq!(big.branches[2].weight, big.branches[3].weight.conj());
        assert!(make_cat(ZERO, 0.0).is_err());
    }

    #[test]
    fn cat_branch_labels() {
        let a = Complex64::new(1.0, 0.5);
        let s = make_cat(a, 0.7).unwrap();
        let labels: Vec<_> = s.branches.iter().map(|b| (b.alpha, b.beta)).collect();
        assert_eq!(labels, vec![(a.conj(), a), (-a.conj(), -a), (a.conj(), -a), (-a.conj(), a)]);
    }

    #[test]
    fn diagonal_branch_stays_physical() {
        let p = MarkovParams::new(1.0, 0.15, 1.2).unwrap();
        let times = grid(100, 30.0);
        let alpha0 = Complex64::new(1.2, 0.7);
        let tr = evolve_cumulants(BranchCumulants::coherent(alpha0), &p.coefficients(), 1.0, &times).unwrap();
        for k in tr {
            assert!((k.k10 - k.k01.conj()).norm() < 1e-10);
            assert!(k.k11.im.abs() < 1e-10);
            assert!((k.k20 - k.k02.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn off_diagonal_centers_are_imaginary() {
        let p = MarkovParams::new(1.0, 0.05, 0.0).unwrap();
        let times = grid(120, 25.0);
        let cat = make_cat(c(2.0), 0.0).unwrap();
        let ev = evolve_superposition(&cat, &p.coefficients(), 1.0, &times).unwrap();
        for b in 2..4 {
            for (t, k) in times.iter().zip(&ev.trajectories[b]) {
                assert!(k.center().re.abs() < 1e-10);
                let expected = 2.0 * (c(2.0) * p.z(*t)).im * (-p.gamma * t).exp();
                let sign = if b == 2 { 1.0 } else { -1.0 };
                assert!((k.center().im - sign * expected).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn early_ramp_gives_quadratic_energy_growth() {
        // With μ = 0 and ν = Γ₀t the occupation cumulant grows as Γ₀t², while the
        // position width only picks up ω²Γ₀t⁴/3 at leading order.
        let gamma0 = 0.4;
        let coeffs = RelaxationCoefficients::LinearRamp { rate: gamma0 };
        let times = grid(11, 0.05);
        let tr = evolve_cumulants(BranchCumulants::coherent(c(1.0)), &coeffs, 1.0, &times).unwrap();
        for (t, k) in times.iter().zip(&tr).skip(4) {
            assert_relative_eq!(k.k11.re, gamma0 * t * t, max_relative = 1e-6);
            let w = (k.variance() - 0.5).re;
            assert_relative_eq!(w, gamma0 * t.powi(4) / 3.0, max_relative = 0.01);
        }
    }
}
