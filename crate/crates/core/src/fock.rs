//! Density-matrix integration in a truncated number basis.
//!
//! All generators are applied elementwise through the ladder structure of
//! `a` and `a†`, so one evaluation costs O(d²) for a d-level truncation.
//! The state is stored row-major, `σ[m·d + n] = ⟨m|σ|n⟩`.

use std::f64::consts::PI;

use log::{debug, trace, warn};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::bath::RelaxationCoefficients;
use crate::error::{domain, Error, Result};
use crate::ode::{self, StepStats, System, Tolerances};
use crate::wavepacket::WavepacketFrame;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Dense `(a, a†, Q)` in the truncated basis.
pub fn build_ladder(dim: usize) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>)> {
    if dim < 2 {
        return domain(format!("ladder needs dim >= 2, got {dim}"));
    }
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let q = &a + &ad;
    Ok((a, ad, q))
}

/// Hermitian density matrix on `dim` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl FockDensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    /// Row-major data of length `dim²`.
    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim < 2 || data.len() != dim * dim {
            return domain(format!("density matrix needs dim >= 2 and dim² entries (dim {dim}, {} entries)", data.len()));
        }
        Ok(Self { dim, data })
    }

    /// Pure state `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &[Complex64]) -> Self {
        let d = psi.len();
        let mut data = Vec::with_capacity(d * d);
        for m in 0..d {
            for n in 0..d {
                data.push(psi[m] * psi[n].conj());
            }
        }
        Self { dim: d, data }
    }

    pub fn number_state(k: usize, dim: usize) -> Result<Self> {
        if k >= dim {
            return domain(format!("number state {k} does not fit in {dim} levels"));
        }
        let mut s = Self::zeros(dim);
        s.data[k * dim + k] = ONE;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[m * self.dim + n]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// Population of the highest retained level.
    pub fn top_population(&self) -> f64 {
        self.get(self.dim - 1, self.dim - 1).re
    }

    /// `max |σ − σ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.data, self.dim)
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn hermiticity_error(s: &[Complex64], d: usize) -> f64 {
    let mut e = 0.0f64;
    for m in 0..d {
        for n in m..d {
            e = e.max((s[m * d + n] - s[n * d + m].conj()).norm());
        }
    }
    e
}

/// σ ← (σ + σ†)/2; returns the largest entry change.
fn symmetrize(s: &mut [Complex64], d: usize) -> f64 {
    let mut corr = 0.0f64;
    for m in 0..d {
        for n in m..d {
            let avg = 0.5 * (s[m * d + n] + s[n * d + m].conj());
            corr = corr.max((avg - s[m * d + n]).norm());
            s[m * d + n] = avg;
            s[n * d + m] = avg.conj();
        }
    }
    corr
}

fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(dim);
    let mut cur = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        c.push(cur);
        cur *= alpha / ((n + 1) as f64).sqrt();
    }
    c
}

fn normalized_pure(psi: Vec<Complex64>, label: &str) -> Result<FockDensityMatrix> {
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    let deficit = 1.0 - norm;
    if deficit > 1e-8 {
        return Err(Error::Truncation(format!(
            "{label} loses {deficit:.3e} of its norm beyond level {}; raise dim",
            psi.len() - 1
        )));
    }
    let s = 1.0 / norm.sqrt();
    Ok(FockDensityMatrix::from_pure(&psi.iter().map(|c| c * s).collect::<Vec<_>>()))
}

/// `|α⟩⟨α|` on `dim` levels.
pub fn coherent_density_matrix(alpha: Complex64, dim: usize) -> Result<FockDensityMatrix> {
    if dim < 2 {
        return domain("density matrix needs dim >= 2");
    }
    normalized_pure(coherent_amplitudes(alpha, dim), &format!("coherent state α = {alpha}"))
}

/// Cat state `N⁻¹(|α⟩ + e^{iφ}|−α⟩)` on `dim` levels.
pub fn cat_density_matrix(alpha: Complex64, phi: f64, dim: usize) -> Result<FockDensityMatrix> {
    if dim < 2 {
        return domain("density matrix needs dim >= 2");
    }
    let n2 = crate::cumulant::cat_norm_squared(alpha, phi);
    if !(n2 > 1e-300) {
        return domain(format!("cat state with α = {alpha}, φ = {phi} has zero norm"));
    }
    let inv = 1.0 / n2.sqrt();
    let e = Complex64::from_polar(1.0, phi);
    let psi = coherent_amplitudes(alpha, dim)
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            c * (ONE + e * sign) * inv
        })
        .collect();
    normalized_pure(psi, &format!("cat state α = {alpha}"))
}

/// Relaxation operator acting on σ.
#[derive(Debug, Clone, PartialEq)]
pub enum DissipatorKind {
    /// Phase-sensitive linear bath:
    /// `γ{[((n+1)a + n a†)σ, a†+a] + [a†+a, σ((n+1)a† + n a)]}`.
    LinearNonRwa { gamma: f64, nbar: f64 },
    /// Rotating-wave damped oscillator with ⟨a⟩ ∝ e^{−(iω+γ)t}.
    LinearRwa { gamma: f64, nbar: f64 },
    /// Two-quantum bath `Γ(n+1)D[a²] + Γn D[a†²]`, `D[L]σ = 2LσL† − L†Lσ − σL†L`.
    QuadraticLindblad { gamma: f64, nbar: f64 },
    /// `Γ(n+1)([a²σ,a†²] + [a†²,σa²]) + Γn([a†²σ,a²] + [a²,σa†²])`.
    QuadraticLiteral { gamma: f64, nbar: f64 },
    /// Linear bath with time-dependent (μ, ν).
    TimeDependent { coefficients: RelaxationCoefficients },
}

impl DissipatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            DissipatorKind::LinearNonRwa { .. } => "linear_non_rwa",
            DissipatorKind::LinearRwa { .. } => "linear_rwa",
            DissipatorKind::QuadraticLindblad { .. } => "quadratic_lindblad",
            DissipatorKind::QuadraticLiteral { .. } => "quadratic_literal",
            DissipatorKind::TimeDependent { .. } => "time_dependent",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |g: f64, n: f64| {
            if g >= 0.0 && n >= 0.0 && g.is_finite() && n.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{}: rates and occupations must be finite and >= 0", self.name())))
            }
        };
        match self {
            DissipatorKind::LinearNonRwa { gamma, nbar }
            | DissipatorKind::LinearRwa { gamma, nbar }
            | DissipatorKind::QuadraticLindblad { gamma, nbar }
            | DissipatorKind::QuadraticLiteral { gamma, nbar } => check(*gamma, *nbar),
            DissipatorKind::TimeDependent { coefficients } => match coefficients {
                RelaxationCoefficients::Modes { .. } => Ok(()),
                _ => Err(Error::Config("time-dependent dissipator needs a discrete-mode bath".into())),
            },
        }
    }
}

/// Elementwise ladder actions on row-major d×d data.
struct Ladder {
    d: usize,
    sqrt: Vec<f64>,
}

impl Ladder {
    fn new(d: usize) -> Self {
        Self { d, sqrt: (0..=d).map(|n| (n as f64).sqrt()).collect() }
    }

    /// a·x
    fn al(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.d;
        let mut out = vec![ZERO; d * d];
        for i in 0..d - 1 {
            let s = self.sqrt[i + 1];
            for j in 0..d {
                out[i * d + j] = x[(i + 1) * d + j] * s;
            }
        }
        out
    }

    /// a†·x
    fn adl(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.d;
        let mut out = vec![ZERO; d * d];
        for i in 1..d {
            let s = self.sqrt[i];
            for j in 0..d {
                out[i * d + j] = x[(i - 1) * d + j] * s;
            }
        }
        out
    }

    /// x·a
    fn ar(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.d;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for j in 1..d {
                out[i * d + j] = x[i * d + j - 1] * self.sqrt[j];
            }
        }
        out
    }

    /// x·a†
    fn adr(&self, x: &[Complex64]) -> Vec<Complex64> {
        let d = self.d;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d - 1 {
                out[i * d + j] = x[i * d + j + 1] * self.sqrt[j + 1];
            }
        }
        out
    }

    /// dy += c·x
    fn axpy(dy: &mut [Complex64], c: Complex64, x: &[Complex64]) {
        for (y, v) in dy.iter_mut().zip(x) {
            *y += c * v;
        }
    }

    fn free(&self, omega: f64, x: &[Complex64], dy: &mut [Complex64]) {
        let d = self.d;
        for i in 0..d {
            for j in 0..d {
                dy[i * d + j] = -I * omega * (i as f64 - j as f64) * x[i * d + j];
            }
        }
    }

    /// `[Mσ, X] + [X, σM†]` with `M = m1·a + m2·a†`, `X = a + a†`.
    fn linear(&self, m1: Complex64, m2: Complex64, x: &[Complex64], dy: &mut [Complex64]) {
        let mut a_ = self.al(x);
        for (v, w) in a_.iter_mut().zip(self.adl(x)) {
            *v = m1 * *v + m2 * w;
        }
        let mut b_ = self.adr(x);
        for (v, w) in b_.iter_mut().zip(self.ar(x)) {
            *v = m1.conj() * *v + m2.conj() * w;
        }
        for (buf, sign) in [(&a_, ONE), (&b_, -ONE)] {
            Self::axpy(dy, sign, &self.ar(buf));
            Self::axpy(dy, sign, &self.adr(buf));
            Self::axpy(dy, -sign, &self.al(buf));
            Self::axpy(dy, -sign, &self.adl(buf));
        }
    }

    fn rwa(&self, gamma: f64, nbar: f64, x: &[Complex64], dy: &mut [Complex64]) {
        let d = self.d;
        let down = gamma * (nbar + 1.0);
        let up = gamma * nbar;
        let ax_ad = self.adr(&self.al(x));
        let ad_x_a = self.ar(&self.adl(x));
        let aad_x = self.al(&self.adl(x));
        let x_aad = self.adr(&self.ar(x));
        for i in 0..d {
            for j in 0..d {
                let k = i * d + j;
                let num = (i + j) as f64 * x[k];
                dy[k] += down * (2.0 * ax_ad[k] - num) + up * (2.0 * ad_x_a[k] - aad_x[k] - x_aad[k]);
            }
        }
    }

    fn l2(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.al(&self.al(x))
    }

    fn ld2(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.adl(&self.adl(x))
    }

    fn r2(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.ar(&self.ar(x))
    }

    fn rd2(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.adr(&self.adr(x))
    }

    fn quadratic_lindblad(&self, gamma: f64, nbar: f64, x: &[Complex64], dy: &mut [Complex64]) {
        let down = Complex64::new(gamma * (nbar + 1.0), 0.0);
        let up = Complex64::new(gamma * nbar, 0.0);
        // D[a²]
        Self::axpy(dy, 2.0 * down, &self.rd2(&self.l2(x)));
        Self::axpy(dy, -down, &self.ld2(&self.l2(x)));
        Self::axpy(dy, -down, &self.r2(&self.rd2(x)));
        if nbar > 0.0 {
            // D[a†²]
            Self::axpy(dy, 2.0 * up, &self.r2(&self.ld2(x)));
            Self::axpy(dy, -up, &self.l2(&self.ld2(x)));
            Self::axpy(dy, -up, &self.rd2(&self.r2(x)));
        }
    }

    fn quadratic_literal(&self, gamma: f64, nbar: f64, x: &[Complex64], dy: &mut [Complex64]) {
        let down = Complex64::new(gamma * (nbar + 1.0), 0.0);
        let up = Complex64::new(gamma * nbar, 0.0);
        let a2x = self.l2(x);
        let xa2 = self.r2(x);
        // [a²σ, a†²] + [a†², σa²]
        Self::axpy(dy, down, &self.rd2(&a2x));
        Self::axpy(dy, -down, &self.ld2(&a2x));
        Self::axpy(dy, down, &self.ld2(&xa2));
        Self::axpy(dy, -down, &self.rd2(&xa2));
        if nbar > 0.0 {
            let ad2x = self.ld2(x);
            let xad2 = self.rd2(x);
            // [a†²σ, a²] + [a², σa†²]
            Self::axpy(dy, up, &self.r2(&ad2x));
            Self::axpy(dy, -up, &self.l2(&ad2x));
            Self::axpy(dy, up, &self.l2(&xad2));
            Self::axpy(dy, -up, &self.r2(&xad2));
        }
    }
}

/// Small cache of (t, μ, ν): step doubling revisits the same stage times.
#[derive(Default)]
struct CoefficientCache {
    entries: Vec<(f64, Complex64, Complex64)>,
    next: usize,
}

impl CoefficientCache {
    const SIZE: usize = 8;

    fn get(&mut self, coeffs: &RelaxationCoefficients, t: f64) -> (Complex64, Complex64) {
        if let Some(&(_, mu, nu)) = self.entries.iter().find(|e| e.0 == t) {
            return (mu, nu);
        }
        let (mu, nu) = coeffs.at(t);
        if self.entries.len() < Self::SIZE {
            self.entries.push((t, mu, nu));
        } else {
            self.entries[self.next] = (t, mu, nu);
            self.next = (self.next + 1) % Self::SIZE;
        }
        (mu, nu)
    }
}

struct Generator<'a> {
    kind: &'a DissipatorKind,
    omega: f64,
    ladder: Ladder,
    cache: CoefficientCache,
}

impl<'a> Generator<'a> {
    fn new(kind: &'a DissipatorKind, omega: f64, dim: usize) -> Self {
        Self { kind, omega, ladder: Ladder::new(dim), cache: CoefficientCache::default() }
    }

    fn apply(&mut self, t: f64, x: &[Complex64], dy: &mut [Complex64]) -> Result<()> {
        self.ladder.free(self.omega, x, dy);
        match self.kind {
            DissipatorKind::LinearNonRwa { gamma, nbar } => {
                let m1 = Complex64::new(gamma * (nbar + 1.0), 0.0);
                let m2 = Complex64::new(gamma * nbar, 0.0);
                self.ladder.linear(m1, m2, x, dy);
            }
            DissipatorKind::LinearRwa { gamma, nbar } => self.ladder.rwa(*gamma, *nbar, x, dy),
            DissipatorKind::QuadraticLindblad { gamma, nbar } => self.ladder.quadratic_lindblad(*gamma, *nbar, x, dy),
            DissipatorKind::QuadraticLiteral { gamma, nbar } => self.ladder.quadratic_literal(*gamma, *nbar, x, dy),
            DissipatorKind::TimeDependent { coefficients } => {
                if t < 0.0 {
                    return domain(format!("time-dependent dissipator evaluated at t = {t} < 0"));
                }
                let (mu, nu) = self.cache.get(coefficients, t);
                self.ladder.linear(mu + nu.conj(), nu, x, dy);
            }
        }
        Ok(())
    }
}

/// `dσ/dt` for one kind at time `t`.
pub fn liouvillian_apply(kind: &DissipatorKind, omega: f64, sigma: &FockDensityMatrix, t: f64) -> Result<FockDensityMatrix> {
    kind.validate()?;
    let d = sigma.dim;
    let mut dy = vec![ZERO; d * d];
    Generator::new(kind, omega, d).apply(t, &sigma.data, &mut dy)?;
    Ok(FockDensityMatrix { dim: d, data: dy })
}

/// Step control and truncation-health thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOptions {
    pub tolerances: Tolerances,
    /// Top-level population that flags the run.
    pub top_warn: f64,
    /// Top-level population that aborts the run.
    pub top_fail: f64,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances { rtol: 1e-8, atol: 1e-10, initial_step: 1e-3, max_steps: 5_000_000 },
            top_warn: 1e-6,
            top_fail: 1e-3,
        }
    }
}

/// Run diagnostics collected along a trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FockHealth {
    /// Largest `|σ − σ†|` seen on an accepted step, before re-symmetrization.
    pub max_hermiticity_drift: f64,
    /// Largest `|tr σ − 1|` at grid points.
    pub max_trace_error: f64,
    pub max_top_population: f64,
    /// Set when the top population exceeded the warning threshold.
    pub truncation_flagged: bool,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone)]
pub struct FockTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FockDensityMatrix>,
    pub health: FockHealth,
}

impl FockTrajectory {
    pub fn observables(&self) -> Vec<Observables> {
        self.times.iter().zip(&self.states).map(|(t, s)| observables(s, *t)).collect()
    }
}

struct FockSystem<'a> {
    generator: Generator<'a>,
    drift: f64,
}

impl System for FockSystem<'_> {
    fn rhs(&mut self, t: f64, y: &[Complex64], dy: &mut [Complex64]) -> Result<()> {
        self.generator.apply(t, y, dy)
    }

    fn on_accept(&mut self, t: f64, y: &mut [Complex64]) {
        let d = self.generator.ladder.d;
        self.drift = self.drift.max(hermiticity_error(y, d));
        let corr = symmetrize(y, d);
        trace!("t = {t}: re-symmetrized, correction {corr:.3e}");
    }
}

/// Integrate `σ(t)` over a strictly increasing grid.
pub fn integrate(
    kind: &DissipatorKind,
    sigma0: &FockDensityMatrix,
    omega: f64,
    times: &[f64],
    opts: FockOptions,
) -> Result<FockTrajectory> {
    kind.validate()?;
    if !(omega > 0.0) {
        return domain(format!("omega must be > 0, got {omega}"));
    }
    let d = sigma0.dim;
    let mut sys = FockSystem { generator: Generator::new(kind, omega, d), drift: 0.0 };
    let mut states = Vec::with_capacity(times.len());
    let mut health = FockHealth::default();
    let stats: StepStats = ode::rk4_step_doubling(&mut sys, &sigma0.data, times, opts.tolerances, |_, _, y| {
        let s = FockDensityMatrix { dim: d, data: y.to_vec() };
        health.max_trace_error = health.max_trace_error.max((s.trace() - ONE).norm());
        health.max_top_population = health.max_top_population.max(s.top_population());
        states.push(s);
    })?;
    health.max_hermiticity_drift = sys.drift;
    health.accepted_steps = stats.accepted;
    health.rejected_steps = stats.rejected;
    health.truncation_flagged = health.max_top_population > opts.top_warn;
    if health.max_top_population > opts.top_fail {
        return Err(Error::Truncation(format!(
            "top level {} reached population {:.3e} (limit {:.1e}); raise dim",
            d - 1,
            health.max_top_population,
            opts.top_fail
        )));
    }
    if health.truncation_flagged {
        warn!(
            "{}: top level population {:.3e} exceeds {:.1e}",
            kind.name(),
            health.max_top_population,
            opts.top_warn
        );
    }
    debug!("{}: {} accepted, {} rejected steps", kind.name(), stats.accepted, stats.rejected);
    Ok(FockTrajectory { times: times.to_vec(), states, health })
}

/// Expectation values of one frame. `variance` is Var(Q)/2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    pub time: f64,
    pub mean_q: f64,
    pub variance: f64,
    pub mean_a: Complex64,
    pub populations: Vec<f64>,
    pub parity: f64,
    pub purity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

pub fn observables(sigma: &FockDensityMatrix, time: f64) -> Observables {
    let d = sigma.dim;
    let lad = Ladder::new(d);
    let tr = |x: &[Complex64]| -> Complex64 { (0..d).map(|i| x[i * d + i]).sum() };
    let a_s = lad.al(&sigma.data);
    let mean_a = tr(&a_s);
    let mut q_s = a_s;
    Ladder::axpy(&mut q_s, ONE, &lad.adl(&sigma.data));
    let mean_q = tr(&q_s).re;
    let qq = tr(&lad.al(&q_s)) + tr(&lad.adl(&q_s));
    let populations = sigma.populations();
    let parity = populations.iter().enumerate().map(|(n, p)| if n % 2 == 0 { *p } else { -*p }).sum();
    Observables {
        time,
        mean_q,
        variance: 0.5 * (qq.re - mean_q * mean_q),
        mean_a,
        parity,
        purity: sigma.data.iter().map(|c| c.norm_sqr()).sum(),
        trace: sigma.trace().re,
        min_eigenvalue: sigma.min_eigenvalue(),
        populations,
    }
}

/// Oscillator eigenfunctions `ψ_0..ψ_{dim−1}` at `q`, with Var(Q) = 1 in the ground state.
pub fn hermite_functions(q: f64, dim: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(dim);
    psi.push((2.0 * PI).powf(-0.25) * (-0.25 * q * q).exp());
    if dim > 1 {
        psi.push(q * psi[0]);
    }
    for n in 1..dim.saturating_sub(1) {
        let next = (q * psi[n] - (n as f64).sqrt() * psi[n - 1]) / ((n + 1) as f64).sqrt();
        psi.push(next);
    }
    psi.truncate(dim);
    psi
}

/// `P(Q) = Σ σ_mn ψ_m(Q) ψ_n(Q)` on `grid`. The frame is flagged coarse when
/// the grid spacing cannot resolve the highest occupied level.
pub fn position_density(sigma: &FockDensityMatrix, grid: &[f64], time: f64) -> WavepacketFrame {
    let d = sigma.dim;
    let density = grid
        .iter()
        .map(|&q| {
            let psi = hermite_functions(q, d);
            let mut acc = 0.0;
            for (m, pm) in psi.iter().enumerate() {
                let row: f64 = sigma.data[m * d..(m + 1) * d].iter().zip(&psi).map(|(s, pn)| s.re * pn).sum();
                acc += pm * row;
            }
            acc
        })
        .collect();
    let top = sigma.populations().iter().rposition(|p| *p > 1e-12).unwrap_or(0);
    let k_max = (top as f64 + 0.5).sqrt();
    let spacing = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    WavepacketFrame { time, grid: grid.to_vec(), density, coarse_grid: spacing > PI / (2.0 * k_max) }
}

/// Long-format CSV `t,observable,value` with scalar observables.
pub fn write_observables_csv<W: std::io::Write>(obs: &[Observables], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "observable", "value"])?;
    for o in obs {
        let t = o.time.to_string();
        let scalars = [
            ("mean_q", o.mean_q),
            ("variance", o.variance),
            ("mean_a_re", o.mean_a.re),
            ("mean_a_im", o.mean_a.im),
            ("parity", o.parity),
            ("purity", o.purity),
            ("trace", o.trace),
            ("min_eigenvalue", o.min_eigenvalue),
        ];
        for (name, v) in scalars {
            w.write_record([t.as_str(), name, &v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
