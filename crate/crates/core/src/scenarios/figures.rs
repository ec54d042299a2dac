//! The four figure experiments, each driven by a typed config with a bundled preset.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{linear_fit, local_maxima, spectral_peak};
use crate::bath::bose_occupation;
use crate::cumulant::{cat_norm_squared, evolve_cumulants, evolve_superposition, make_cat, BranchCumulants, MarkovParams};
use crate::error::{Error, Result};
use crate::fock::{
    cat_density_matrix, coherent_density_matrix, integrate, observables, position_density, DissipatorKind,
    FockDensityMatrix, FockHealth, FockOptions,
};
use crate::wavepacket::{
    branch_density, branches_at, collision_times, decoherence_rate, density_frame, fit_decoherence_rate,
    interference_term, significance_ratio, split_frames, GaussianBranchDensity, QGrid, WavepacketFrame,
};

use super::config::{frame_indices, linspace, parse_with_overrides};
use super::output::{FrameStack, RunOutput, Series};

pub const FIG1_PRESET: &str = include_str!("../../presets/fig1.toml");
pub const FIG2_PRESET: &str = include_str!("../../presets/fig2.toml");
pub const FIG3_PRESET: &str = include_str!("../../presets/fig3.toml");
pub const FIG4_PRESET: &str = include_str!("../../presets/fig4.toml");

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_grid_sizes(points: usize, frames: usize, periods: f64) -> Result<()> {
    if points < 8 || frames > points || !(periods > 0.0) {
        return Err(Error::Config(format!(
            "need points >= 8, frames <= points and periods > 0 (got {points}, {frames}, {periods})"
        )));
    }
    Ok(())
}

fn validated_grid(g: &QGrid) -> Result<Vec<f64>> {
    Ok(QGrid::new(g.min, g.max, g.points)?.values())
}

/// Coherent-state broadening under the Markovian phase-sensitive bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig1Config {
    pub omega: f64,
    pub gamma: f64,
    pub kt: f64,
    pub alpha0: f64,
    pub periods: f64,
    pub points: usize,
    pub frames: usize,
    pub q_grid: QGrid,
}

impl Fig1Config {
    pub fn preset(overrides: &[String]) -> Result<Self> {
        parse_with_overrides(FIG1_PRESET, overrides)
    }
}

pub fn run_fig1(cfg: &Fig1Config) -> Result<RunOutput> {
    check_grid_sizes(cfg.points, cfg.frames, cfg.periods)?;
    let grid = validated_grid(&cfg.q_grid)?;
    let nbar = bose_occupation(cfg.omega, cfg.kt)?;
    let p = MarkovParams::new(cfg.omega, cfg.gamma, nbar)?;
    let times = linspace(0.0, cfg.periods * p.period(), cfg.points);
    let tr = evolve_cumulants(BranchCumulants::coherent(real(cfg.alpha0)), &p.coefficients(), cfg.omega, &times)?;

    let mean_q: Vec<f64> = tr.iter().map(|k| k.center().re).collect();
    let v: Vec<f64> = tr.iter().map(|k| k.variance().re).collect();
    let v_exact: Vec<f64> = times.iter().map(|&t| p.variance(t)).collect();
    let deviation = v.iter().zip(&v_exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let mut frames = Vec::new();
    for i in frame_indices(times.len(), cfg.frames) {
        let b = GaussianBranchDensity::from_cumulants(&tr[i], real(1.0));
        frames.push(density_frame(&[b], &grid, times[i])?);
    }
    let peak = spectral_peak(times[1] - times[0], &v)?;

    let mut out = RunOutput::new("fig1");
    out.put("nbar", nbar);
    out.put("effective_frequency", p.effective_frequency());
    out.put("variance_limit", 0.5 + nbar);
    out.put("variance_final", *v.last().expect("non-empty"));
    out.put("variance_max_deviation_from_closed_form", deviation);
    out.put("variance_spectral_peak", peak.frequency);
    out.put("variance_spectral_resolution", peak.resolution);
    out.put("two_effective_frequency", 2.0 * p.effective_frequency());
    out.series.push(Series::new("mean_q", times.clone(), mean_q));
    out.series.push(Series::new("variance", times.clone(), v));
    out.series.push(Series::new("variance_closed_form", times, v_exact));
    out.stacks.push(FrameStack { name: "density".into(), frames });
    Ok(out)
}

/// Cat-state fringes and their decay in a weakly damped, cold bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Config {
    pub omega: f64,
    pub gamma: f64,
    pub nbar: f64,
    pub alpha: f64,
    pub phi: f64,
    pub periods: f64,
    pub points: usize,
    pub frames: usize,
    pub q_grid: QGrid,
}

impl Fig2Config {
    pub fn preset(overrides: &[String]) -> Result<Self> {
        parse_with_overrides(FIG2_PRESET, overrides)
    }
}

pub fn run_fig2(cfg: &Fig2Config) -> Result<RunOutput> {
    check_grid_sizes(cfg.points, cfg.frames, cfg.periods)?;
    let grid = validated_grid(&cfg.q_grid)?;
    let p = MarkovParams::new(cfg.omega, cfg.gamma, cfg.nbar)?;
    let alpha = real(cfg.alpha);
    let t_end = cfg.periods * p.period();
    let times = linspace(0.0, t_end, cfg.points);
    let cat = make_cat(alpha, cfg.phi)?;
    let ev = evolve_superposition(&cat, &p.coefficients(), cfg.omega, &times)?;

    let mut full = Vec::new();
    let mut inter = Vec::new();
    let mut worst_norm: f64 = 0.0;
    let mut min_density = f64::INFINITY;
    for i in frame_indices(times.len(), cfg.frames) {
        let branches = branches_at(&ev, i);
        let f = density_frame(&branches, &grid, times[i])?;
        let (_, int) = split_frames(&branches, &grid, times[i])?;
        worst_norm = worst_norm.max((f.integral() - 1.0).abs());
        min_density = min_density.min(f.min_value());
        full.push(f);
        inter.push(int);
    }

    let p_int: Vec<f64> = times.iter().map(|&t| interference_term(alpha, cfg.phi, &p, 0.0, t)).collect();
    let sig: Vec<f64> = times.iter().map(|&t| significance_ratio(alpha, &p, t)).collect();
    let mut out = RunOutput::new("fig2");
    if let Some(&t1) = collision_times(&p, t_end).first() {
        out.put("first_collision_time", t1);
        out.put("significance_first_collision", significance_ratio(alpha, &p, t1));
        out.put("significance_first_order", 1.0 - 2.0 * cfg.gamma * t1);
    }
    match fit_decoherence_rate(alpha, cfg.phi, &p, t_end) {
        Ok(fit) => {
            out.put("fitted_rate", fit.rate);
            out.put("fitted_rate_over_rate_law", fit.rate / decoherence_rate(alpha, cfg.gamma));
        }
        Err(e) => out.warnings.push(format!("no decay fit: {e}")),
    }
    out.put("rate_law", decoherence_rate(alpha, cfg.gamma));
    out.put("max_norm_error", worst_norm);
    out.put("min_density", min_density);
    out.series.push(Series::new("interference_q0", times.clone(), p_int));
    out.series.push(Series::new("significance", times, sig));
    out.stacks.push(FrameStack { name: "density".into(), frames: full });
    out.stacks.push(FrameStack { name: "interference".into(), frames: inter });
    Ok(out)
}

/// Interference at the origin: closed form, rotating-wave Fock run and early-stage kinematics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig3Config {
    pub omega: f64,
    pub gamma: f64,
    pub nbar: f64,
    pub alpha: f64,
    pub phi: f64,
    pub periods: f64,
    pub points: usize,
    pub dim: usize,
    /// Early-stage constant; defaults to `γ(2n+1)ω/π`, a flat band of width ω.
    pub gamma0: Option<f64>,
}

impl Fig3Config {
    pub fn preset(overrides: &[String]) -> Result<Self> {
        parse_with_overrides(FIG3_PRESET, overrides)
    }

    pub fn early_constant(&self) -> f64 {
        self.gamma0.unwrap_or(self.gamma * (2.0 * self.nbar + 1.0) * self.omega / PI)
    }
}

/// Mixture part `N⁻²[G(c) + G(−c)]` at `q` of a cat with diagonal branches at ±c.
fn cat_mixture(q: f64, center: f64, v: f64, alpha: Complex64, phi: f64) -> Result<f64> {
    let w = real(1.0 / cat_norm_squared(alpha, phi));
    let g = |c: f64| {
        branch_density(q, &GaussianBranchDensity { center: real(c), variance: real(v), weight: w, diagonal: true })
    };
    Ok(g(center)?.re + g(-center)?.re)
}

/// Rotating-wave interference series at Q = 0, with the mixture removed
/// analytically from the exact RWA means and widths.
pub fn rwa_interference_q0(
    alpha: Complex64,
    phi: f64,
    omega: f64,
    gamma: f64,
    nbar: f64,
    dim: usize,
    times: &[f64],
) -> Result<(Vec<f64>, FockHealth)> {
    let s0 = cat_density_matrix(alpha, phi, dim)?;
    let tr = integrate(&DissipatorKind::LinearRwa { gamma, nbar }, &s0, omega, times, FockOptions::default())?;
    let mut out = Vec::with_capacity(times.len());
    for (t, s) in times.iter().zip(&tr.states) {
        let p = position_density(s, &[0.0], *t).density[0];
        let center = 2.0 * (alpha * Complex64::from_polar(1.0, -omega * t)).re * (-gamma * t).exp();
        let v = 0.5 + nbar * (1.0 - (-2.0 * gamma * t).exp());
        out.push(p - cat_mixture(0.0, center, v, alpha, phi)?);
    }
    Ok((out, tr.health))
}

/// Interference at Q = 0 from the undamped early-stage kinematics, V = 1/2 + Γ₀t².
pub fn early_interference_q0(alpha: Complex64, phi: f64, omega: f64, gamma0: f64, t: f64) -> f64 {
    let v = 0.5 + gamma0 * t * t;
    let s = (alpha.conj() * Complex64::from_polar(1.0, omega * t)).im;
    (-2.0 * alpha.norm_sqr() + s * s / v).exp() / (cat_norm_squared(alpha, phi) * (PI * v).sqrt()) * phi.cos()
}

pub fn run_fig3(cfg: &Fig3Config) -> Result<RunOutput> {
    check_grid_sizes(cfg.points, 0, cfg.periods)?;
    let p = MarkovParams::new(cfg.omega, cfg.gamma, cfg.nbar)?;
    let alpha = real(cfg.alpha);
    let times = linspace(0.0, cfg.periods * 2.0 * PI / cfg.omega, cfg.points);
    let non_rwa: Vec<f64> = times.iter().map(|&t| interference_term(alpha, cfg.phi, &p, 0.0, t)).collect();
    let (rwa, health) = rwa_interference_q0(alpha, cfg.phi, cfg.omega, cfg.gamma, cfg.nbar, cfg.dim, &times)?;
    let g0 = cfg.early_constant();
    let early: Vec<f64> = times.iter().map(|&t| early_interference_q0(alpha, cfg.phi, cfg.omega, g0, t)).collect();

    let mut out = RunOutput::new("fig3");
    out.put("initial_spread", (non_rwa[0] - rwa[0]).abs().max((non_rwa[0] - early[0]).abs()));
    out.put("early_constant", g0);
    let peaks_n = local_maxima(&times, &non_rwa);
    let peaks_r = local_maxima(&times, &rwa);
    let pairs = peaks_n.len().min(peaks_r.len());
    if pairs >= 2 {
        let t: Vec<f64> = peaks_r[..pairs].iter().map(|p| p.0).collect();
        let lag: Vec<f64> = peaks_n[..pairs].iter().zip(&peaks_r).map(|(a, b)| a.0 - b.0).collect();
        let fit = linear_fit(&t, &lag)?;
        out.put("peak_lag_slope", fit.slope);
        out.put("peak_lag_slope_expected", cfg.omega / p.effective_frequency() - 1.0);
        out.put("peak_lag_final", *lag.last().expect("pairs >= 2"));
    }
    let last_period = times.iter().position(|&t| t >= times[times.len() - 1] - 2.0 * PI / cfg.omega).unwrap_or(0);
    let amp = |s: &[f64]| s[last_period..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    out.put("late_amplitude_non_rwa", amp(&non_rwa));
    out.put("late_amplitude_early", amp(&early));
    out.put("fock_max_trace_error", health.max_trace_error);
    out.put("fock_max_top_population", health.max_top_population);
    out.series.push(Series::new("non_rwa", times.clone(), non_rwa));
    out.series.push(Series::new("rwa", times.clone(), rwa));
    out.series.push(Series::new("early", times, early));
    Ok(out)
}

/// Linear versus two-quantum bath.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig4Config {
    pub omega: f64,
    pub kt: f64,
    pub dim: usize,
    pub points: usize,
    pub frames: usize,
    pub q_grid: QGrid,
    pub coherent: Fig4Coherent,
    pub cat: Fig4Cat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig4Coherent {
    pub alpha0: f64,
    pub gamma_linear: f64,
    pub nbar_linear: f64,
    pub gamma_quadratic: f64,
    pub nbar_quadratic: f64,
    pub periods: f64,
}

/// Occupations follow from `kt` at ω (linear) and 2ω (quadratic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig4Cat {
    pub alpha: f64,
    pub phi: f64,
    pub gamma_linear: f64,
    pub gamma_quadratic: f64,
    pub periods: f64,
}

impl Fig4Config {
    pub fn preset(overrides: &[String]) -> Result<Self> {
        parse_with_overrides(FIG4_PRESET, overrides)
    }
}

/// Mean-position trajectory of one Fock run with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanTrajectory {
    pub times: Vec<f64>,
    pub mean_q: Vec<f64>,
    pub health: FockHealth,
}

pub fn fock_mean_q(kind: &DissipatorKind, s0: &FockDensityMatrix, omega: f64, times: &[f64]) -> Result<MeanTrajectory> {
    let tr = integrate(kind, s0, omega, times, FockOptions::default())?;
    let mean_q = tr.states.iter().zip(times).map(|(s, t)| observables(s, *t).mean_q).collect();
    Ok(MeanTrajectory { times: times.to_vec(), mean_q, health: tr.health })
}

/// `(t, |Q|)` at t = 0 and at every local maximum of |Q|.
pub fn envelope_points(times: &[f64], q: &[f64]) -> Vec<(f64, f64)> {
    let abs: Vec<f64> = q.iter().map(|v| v.abs()).collect();
    let mut pts = vec![(times[0], abs[0])];
    pts.extend(local_maxima(times, &abs));
    pts
}

/// Shape of a decaying envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeShape {
    /// Largest residual of a straight-line fit to ln|Q| peaks, over the range of ln|Q|.
    pub log_residual_fraction: f64,
    pub early_rate: f64,
    pub late_rate: f64,
}

pub fn envelope_shape(times: &[f64], q: &[f64]) -> Result<EnvelopeShape> {
    let pts = envelope_points(times, q);
    if pts.len() < 3 {
        return Err(Error::Domain(format!("need three envelope points, found {}", pts.len())));
    }
    let t: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let l: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&t, &l)?;
    let range = l.iter().copied().fold(f64::NEG_INFINITY, f64::max) - l.iter().copied().fold(f64::INFINITY, f64::min);
    let rate = |i: usize| -(l[i + 1] - l[i]) / (t[i + 1] - t[i]);
    Ok(EnvelopeShape {
        log_residual_fraction: fit.max_residual / range,
        early_rate: rate(0),
        late_rate: rate(pts.len() - 2),
    })
}

/// Fringe visibility of a cat at time `t`: the interference part is the full
/// density minus an independently evolved two-packet mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct CatVisibility {
    pub time: f64,
    pub visibility: f64,
    pub full: WavepacketFrame,
    pub interference: WavepacketFrame,
    pub norm_error: f64,
    pub health: Vec<FockHealth>,
}

pub fn cat_visibility(
    kind: &DissipatorKind,
    alpha: Complex64,
    phi: f64,
    omega: f64,
    dim: usize,
    t: f64,
    grid: &[f64],
) -> Result<CatVisibility> {
    let cat = cat_density_matrix(alpha, phi, dim)?;
    let plus = coherent_density_matrix(alpha, dim)?;
    let minus = coherent_density_matrix(-alpha, dim)?;
    let mix = FockDensityMatrix::from_row_major(
        dim,
        plus.as_slice().iter().zip(minus.as_slice()).map(|(a, b)| 0.5 * (a + b)).collect(),
    )?;
    let times = [0.0, t];
    let opts = FockOptions::default();
    let tc = integrate(kind, &cat, omega, &times, opts)?;
    let tm = integrate(kind, &mix, omega, &times, opts)?;
    let full = position_density(&tc.states[1], grid, t);
    let scale = 2.0 / cat_norm_squared(alpha, phi);
    let mixture: Vec<f64> = position_density(&tm.states[1], grid, t).density.iter().map(|p| p * scale).collect();
    let interference = WavepacketFrame {
        time: t,
        grid: grid.to_vec(),
        density: full.density.iter().zip(&mixture).map(|(a, b)| a - b).collect(),
        coarse_grid: full.coarse_grid,
    };
    let m = mixture.iter().copied().fold(0.0, f64::max);
    let visibility = interference.density.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) / m;
    Ok(CatVisibility {
        time: t,
        visibility,
        norm_error: (full.integral() - 1.0).abs(),
        full,
        interference,
        health: vec![tc.health, tm.health],
    })
}

/// Occupations of the Fig. 4 cat runs: `(n(ω), n(2ω))`.
pub fn fig4_occupations(cfg: &Fig4Config) -> Result<(f64, f64)> {
    Ok((bose_occupation(cfg.omega, cfg.kt)?, bose_occupation(2.0 * cfg.omega, cfg.kt)?))
}

pub fn run_fig4(cfg: &Fig4Config) -> Result<RunOutput> {
    check_grid_sizes(cfg.points, cfg.frames, cfg.coherent.periods.min(cfg.cat.periods))?;
    let grid = validated_grid(&cfg.q_grid)?;
    let period = 2.0 * PI / cfg.omega;
    let mut out = RunOutput::new("fig4");

    let c = &cfg.coherent;
    let times = linspace(0.0, c.periods * period, cfg.points);
    let s0 = coherent_density_matrix(real(c.alpha0), cfg.dim)?;
    let lin = fock_mean_q(&DissipatorKind::LinearNonRwa { gamma: c.gamma_linear, nbar: c.nbar_linear }, &s0, cfg.omega, &times)?;
    let quad = fock_mean_q(
        &DissipatorKind::QuadraticLindblad { gamma: c.gamma_quadratic, nbar: c.nbar_quadratic },
        &s0,
        cfg.omega,
        &times,
    )?;
    let ls = envelope_shape(&times, &lin.mean_q)?;
    let qs = envelope_shape(&times, &quad.mean_q)?;
    out.put("a_linear_log_residual_fraction", ls.log_residual_fraction);
    out.put("a_quadratic_early_rate", qs.early_rate);
    out.put("a_quadratic_late_rate", qs.late_rate);
    out.series.push(Series::new("a_linear_mean_q", times.clone(), lin.mean_q));
    out.series.push(Series::new("a_quadratic_mean_q", times, quad.mean_q));

    let k = &cfg.cat;
    let (n1, n2) = fig4_occupations(cfg)?;
    out.put("nbar_omega", n1);
    out.put("nbar_two_omega", n2);
    let alpha = real(k.alpha);
    let linear = DissipatorKind::LinearNonRwa { gamma: k.gamma_linear, nbar: n1 };
    let quadratic = DissipatorKind::QuadraticLindblad { gamma: k.gamma_quadratic, nbar: n2 };
    let free = DissipatorKind::LinearNonRwa { gamma: 0.0, nbar: 0.0 };
    let t1 = collision_times(&MarkovParams::new(cfg.omega, k.gamma_linear, n1)?, period)
        .first()
        .copied()
        .unwrap_or(0.25 * period);
    let vb = cat_visibility(&linear, alpha, k.phi, cfg.omega, cfg.dim, t1, &grid)?;
    let t1q = 0.25 * period;
    let vc = cat_visibility(&quadratic, alpha, k.phi, cfg.omega, cfg.dim, t1q, &grid)?;
    let v0 = cat_visibility(&free, alpha, k.phi, cfg.omega, cfg.dim, t1q, &grid)?;
    out.put("b_visibility_first_collision", vb.visibility);
    out.put("c_visibility_first_collision", vc.visibility);
    out.put("free_visibility_first_collision", v0.visibility);
    out.put("c_retained_fraction", vc.visibility / v0.visibility);
    out.put("c_over_b_visibility", vc.visibility / vb.visibility);

    let times = linspace(0.0, k.periods * period, cfg.points);
    let idx = frame_indices(times.len(), cfg.frames);
    let frame_times: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
    let cat = cat_density_matrix(alpha, k.phi, cfg.dim)?;
    for (name, kind) in [("b_linear", &linear), ("c_quadratic", &quadratic)] {
        let tr = integrate(kind, &cat, cfg.omega, &frame_times, FockOptions::default())?;
        let frames = tr.states.iter().zip(&frame_times).map(|(s, t)| position_density(s, &grid, *t)).collect();
        out.stacks.push(FrameStack { name: name.into(), frames });
    }
    Ok(out)
}
