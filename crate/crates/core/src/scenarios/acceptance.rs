//! The ten acceptance criteria, each measured by a run and judged by a pure check.
//!
//! Measurements land in a name → value map so that the judgement can be
//! re-applied to altered inputs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::{crossing_frequency, linear_fit, spectral_peak};
use crate::bath::{
    bose_occupation, correlation_time, early_time_constant, frequency_comb, relaxation_coefficients, BathModel,
};
use crate::cumulant::{analytic_markov, evolve_cumulants, BranchCumulants, MarkovParams};
use crate::error::{Error, Result};
use crate::fock::{
    build_ladder, coherent_density_matrix, integrate, observables, DissipatorKind, FockDensityMatrix, FockHealth,
    FockOptions,
};
use crate::wavepacket::{collision_times, decoherence_rate, fit_decoherence_rate, QGrid, WavepacketFrame};

use super::config::linspace;
use super::figures::{cat_visibility, envelope_shape, fock_mean_q, Fig4Config};
use super::output::Format;

pub type Measured = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AcceptanceOptions {
    /// Replaces the Fock truncation of criteria 1, 2, 4, 7 and 8.
    pub fock_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub measured: Measured,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    /// One report line, `PASS`/`FAIL` first.
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
}

impl AcceptanceReport {
    pub fn criterion(&self, id: u8) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }
}

pub const NAMES: [&str; 10] = [
    "effective-frequency shift",
    "cumulant vs Fock equivalence",
    "cumulant vs closed form",
    "broadening saturation and oscillation",
    "decoherence-rate law",
    "parity selection",
    "bath discrimination",
    "superposition conservation",
    "conservation suite",
    "early-time law",
];

/// Conservation data gathered from every run of criteria 1–8.
#[derive(Debug, Clone, Copy, Default)]
struct Conservation {
    trace: f64,
    drift: f64,
    norm: f64,
    trajectories: usize,
    frames: usize,
}

impl Conservation {
    fn absorb(&mut self, h: &FockHealth) {
        self.trace = self.trace.max(h.max_trace_error);
        self.drift = self.drift.max(h.max_hermiticity_drift);
        self.trajectories += 1;
    }

    fn frame(&mut self, f: &WavepacketFrame) {
        self.norm = self.norm.max((f.integral() - 1.0).abs());
        self.frames += 1;
    }
}

fn get(m: &Measured, key: &str) -> f64 {
    m.get(key).copied().unwrap_or(f64::NAN)
}

fn within(x: f64, reference: f64, rel: f64) -> bool {
    (x - reference).abs() <= rel * reference.abs()
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn mset(pairs: &[(&str, f64)]) -> Measured {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

// ---- criterion 1

const SHIFTED_FREQUENCY: f64 = 0.96825;

fn measure_1(opts: &AcceptanceOptions, cons: &mut Conservation) -> Result<Measured> {
    let p = MarkovParams::new(1.0, 0.25, 0.4)?;
    let times = linspace(0.0, 6.0 * p.period(), 1201);
    let kind = DissipatorKind::LinearNonRwa { gamma: 0.25, nbar: 0.4 };
    let s0 = coherent_density_matrix(real(1.0), opts.fock_dim.unwrap_or(30))?;
    let start = Instant::now();
    let tr = fock_mean_q(&kind, &s0, 1.0, &times)?;
    let freq = crossing_frequency(&times, &tr.mean_q)?;
    let seconds = start.elapsed().as_secs_f64();
    cons.absorb(&tr.health);
    Ok(mset(&[("frequency", freq), ("reference", p.effective_frequency()), ("run_seconds", seconds)]))
}

pub fn check_1(m: &Measured) -> (bool, String) {
    let (f, r) = (get(m, "frequency"), get(m, "reference"));
    let ok = within(f, r, 0.005) && within(r, SHIFTED_FREQUENCY, 1e-4) && get(m, "run_seconds") < 10.0;
    (ok, format!("frequency {f:.6} vs {r:.6} (pinned {SHIFTED_FREQUENCY}), tolerance 0.5%"))
}

// ---- criterion 2

fn measure_2(opts: &AcceptanceOptions, cons: &mut Conservation) -> Result<Measured> {
    let p = MarkovParams::new(1.0, 0.05, 0.0)?;
    let times = linspace(0.0, 10.0 * p.period(), 1001);
    let kind = DissipatorKind::LinearNonRwa { gamma: 0.05, nbar: 0.0 };
    let s0 = coherent_density_matrix(real(1.0), opts.fock_dim.unwrap_or(30))?;
    let tr = integrate(&kind, &s0, 1.0, &times, FockOptions::default())?;
    cons.absorb(&tr.health);
    let cum = evolve_cumulants(BranchCumulants::coherent(real(1.0)), &p.coefficients(), 1.0, &times)?;
    let (mut dq, mut dv) = (0.0f64, 0.0f64);
    for (s, (k, t)) in tr.states.iter().zip(cum.iter().zip(&times)) {
        let o = observables(s, *t);
        dq = dq.max((o.mean_q - k.center().re).abs());
        dv = dv.max((o.variance - k.variance().re).abs());
    }
    Ok(mset(&[("max_dq", dq), ("max_dv", dv)]))
}

pub fn check_2(m: &Measured) -> (bool, String) {
    let (dq, dv) = (get(m, "max_dq"), get(m, "max_dv"));
    (dq <= 1e-4 && dv <= 1e-4, format!("max|ΔQ| {dq:.2e}, max|ΔV| {dv:.2e}, limit 1e-4"))
}

// ---- criterion 3

fn measure_3() -> Result<Measured> {
    let nbar = bose_occupation(1.0, 3.0)?;
    let p = MarkovParams::new(1.0, 0.1, nbar)?;
    let times = linspace(0.0, 10.0 * p.period(), 1001);
    let alpha = real(2.0);
    let cum = evolve_cumulants(BranchCumulants::coherent(alpha), &p.coefficients(), 1.0, &times)?;
    let (mut dq, mut dv) = (0.0f64, 0.0f64);
    for (k, &t) in cum.iter().zip(&times) {
        let a = analytic_markov(alpha, 0.1, 1.0, nbar, t)?;
        dq = dq.max((k.center().re - a.q).abs());
        dv = dv.max((k.variance().re - a.v).abs());
    }
    Ok(mset(&[("max_dq", dq), ("max_dv", dv)]))
}

pub fn check_3(m: &Measured) -> (bool, String) {
    let d = get(m, "max_dq").max(get(m, "max_dv"));
    (d <= 1e-8, format!("max deviation {d:.2e}, limit 1e-8"))
}

// ---- criterion 4

fn measure_4(opts: &AcceptanceOptions, cons: &mut Conservation) -> Result<Measured> {
    let nbar = bose_occupation(1.0, 3.0)?;
    let p = MarkovParams::new(1.0, 0.1, nbar)?;
    let times = linspace(0.0, 8.0 * p.period(), 801);
    let kind = DissipatorKind::LinearNonRwa { gamma: 0.1, nbar };
    let s0 = coherent_density_matrix(real(2.0), opts.fock_dim.unwrap_or(40))?;
    let start = Instant::now();
    let tr = integrate(&kind, &s0, 1.0, &times, FockOptions::default())?;
    let seconds = start.elapsed().as_secs_f64();
    cons.absorb(&tr.health);
    let v: Vec<f64> = tr.states.iter().zip(&times).map(|(s, t)| observables(s, *t).variance).collect();
    let peak = spectral_peak(times[1] - times[0], &v)?;
    Ok(mset(&[
        ("variance_final", *v.last().expect("non-empty grid")),
        ("variance_limit", 0.5 + 1.0 / ((1.0f64 / 3.0).exp() - 1.0)),
        ("spectral_peak", peak.frequency),
        ("spectral_resolution", peak.resolution),
        ("two_effective_frequency", 2.0 * p.effective_frequency()),
        ("run_seconds", seconds),
    ]))
}

pub fn check_4(m: &Measured) -> (bool, String) {
    let (v, lim) = (get(m, "variance_final"), get(m, "variance_limit"));
    let (pk, two_w, res) = (get(m, "spectral_peak"), get(m, "two_effective_frequency"), get(m, "spectral_resolution"));
    let ok = within(v, lim, 0.01) && (pk - two_w).abs() <= res && get(m, "run_seconds") < 60.0;
    (ok, format!("V_end {v:.5} vs {lim:.5} (1%); peak {pk:.4} vs 2ω̃ {two_w:.4} ± {res:.4}"))
}

// ---- criterion 5

const RATE_AMPLITUDES: [f64; 3] = [1.0, 1.5, 2.0];

fn measure_5() -> Result<Measured> {
    let gamma = 0.02;
    let p = MarkovParams::new(1.0, gamma, 0.0)?;
    let mut m = Measured::new();
    let mut rates = Vec::new();
    for a in RATE_AMPLITUDES {
        let fit = fit_decoherence_rate(real(a), 0.0, &p, 2.0 * p.period())?;
        m.insert(format!("rate_alpha_{a}"), fit.rate);
        m.insert(format!("ratio_alpha_{a}"), fit.rate / decoherence_rate(real(a), gamma));
        rates.push(fit.rate);
    }
    let a2: Vec<f64> = RATE_AMPLITUDES.iter().map(|a| a * a).collect();
    m.insert("linearity_r_squared".into(), linear_fit(&a2, &rates)?.r_squared);
    Ok(m)
}

pub fn check_5(m: &Measured) -> (bool, String) {
    let ratios: Vec<f64> = RATE_AMPLITUDES.iter().map(|a| get(m, &format!("ratio_alpha_{a}"))).collect();
    let r2 = get(m, "linearity_r_squared");
    let ok = ratios.iter().all(|r| (0.9..=1.1).contains(r)) && r2 >= 0.99;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    (ok, format!("rate / 2|α|²γ = [{}] (need 0.9–1.1), R² {r2:.5}", shown.join(", ")))
}

// ---- criterion 6

const PARITY_GAMMA: f64 = 0.5;

/// `−(dσ/dt)₂₂ / σ₂₂` for σ = |2⟩⟨2| from dense matrix products.
fn two_quantum_rate_oracle(gamma: f64, dim: usize) -> Result<f64> {
    let (a, ad, _) = build_ladder(dim)?;
    let (l, ld) = (&a * &a, &ad * &ad);
    let sigma = FockDensityMatrix::number_state(2, dim)?.to_matrix();
    let d = (&l * &sigma * &ld) * Complex64::new(2.0, 0.0) - &ld * &l * &sigma - &sigma * &ld * &l;
    Ok(-gamma * d[(2, 2)].re)
}

fn measure_6(cons: &mut Conservation) -> Result<Measured> {
    let dim = 12;
    let kind = DissipatorKind::QuadraticLindblad { gamma: PARITY_GAMMA, nbar: 0.0 };
    let times = linspace(0.0, 10.0 / PARITY_GAMMA, 201);
    let tr = integrate(&kind, &FockDensityMatrix::number_state(1, dim)?, 1.0, &times, FockOptions::default())?;
    cons.absorb(&tr.health);
    let dev = tr.states.iter().fold(0.0f64, |m, s| m.max((s.get(1, 1).re - 1.0).abs()));
    let times = linspace(0.0, 2.5 / PARITY_GAMMA, 101);
    let tr = integrate(&kind, &FockDensityMatrix::number_state(2, dim)?, 1.0, &times, FockOptions::default())?;
    cons.absorb(&tr.health);
    let ln: Vec<f64> = tr.states.iter().map(|s| s.get(2, 2).re.ln()).collect();
    let fit = linear_fit(&times, &ln)?;
    Ok(mset(&[
        ("sigma11_max_deviation", dev),
        ("fitted_rate", -fit.slope),
        ("oracle_rate", two_quantum_rate_oracle(PARITY_GAMMA, dim)?),
        ("four_gamma", 4.0 * PARITY_GAMMA),
    ]))
}

pub fn check_6(m: &Measured) -> (bool, String) {
    let (dev, rate, oracle) = (get(m, "sigma11_max_deviation"), get(m, "fitted_rate"), get(m, "oracle_rate"));
    let ok = dev <= 1e-8 && within(rate, oracle, 0.01) && within(oracle, get(m, "four_gamma"), 0.01);
    (ok, format!("|σ₁₁−1| {dev:.2e}; σ₂₂ rate {rate:.6} vs oracle {oracle:.6}"))
}

// ---- criteria 7 and 8

fn fig4(opts: &AcceptanceOptions) -> Result<Fig4Config> {
    let mut cfg = Fig4Config::preset(&[])?;
    if let Some(d) = opts.fock_dim {
        cfg.dim = d;
    }
    Ok(cfg)
}

fn measure_7(opts: &AcceptanceOptions, cons: &mut Conservation) -> Result<Measured> {
    let cfg = fig4(opts)?;
    let c = &cfg.coherent;
    let times = linspace(0.0, c.periods * 2.0 * PI / cfg.omega, cfg.points);
    let s0 = coherent_density_matrix(real(c.alpha0), cfg.dim)?;
    let lin = fock_mean_q(&DissipatorKind::LinearNonRwa { gamma: c.gamma_linear, nbar: c.nbar_linear }, &s0, cfg.omega, &times)?;
    let quad = fock_mean_q(
        &DissipatorKind::QuadraticLindblad { gamma: c.gamma_quadratic, nbar: c.nbar_quadratic },
        &s0,
        cfg.omega,
        &times,
    )?;
    cons.absorb(&lin.health);
    cons.absorb(&quad.health);
    let ls = envelope_shape(&times, &lin.mean_q)?;
    let qs = envelope_shape(&times, &quad.mean_q)?;
    Ok(mset(&[
        ("quadratic_early_rate", qs.early_rate),
        ("quadratic_late_rate", qs.late_rate),
        ("linear_log_residual_fraction", ls.log_residual_fraction),
    ]))
}

/// The rate ratio is judged as `early ≥ 3·late` so that a late plateau, whose
/// rate may come out as −0 from peak interpolation, counts as an infinite ratio.
pub fn check_7(m: &Measured) -> (bool, String) {
    let (early, late) = (get(m, "quadratic_early_rate"), get(m, "quadratic_late_rate"));
    let res = get(m, "linear_log_residual_fraction");
    let ok = early > 0.0 && early >= 3.0 * late && res < 0.02;
    (
        ok,
        format!(
            "quadratic early rate {early:.4} vs late {late:.2e} (need early ≥ 3·late), linear residual {:.2}% (need < 2%)",
            100.0 * res
        ),
    )
}

fn measure_8(opts: &AcceptanceOptions, cons: &mut Conservation) -> Result<Measured> {
    let cfg = fig4(opts)?;
    let k = &cfg.cat;
    let grid = QGrid::new(cfg.q_grid.min, cfg.q_grid.max, cfg.q_grid.points)?.values();
    let (n1, n2) = (bose_occupation(cfg.omega, cfg.kt)?, bose_occupation(2.0 * cfg.omega, cfg.kt)?);
    let period = 2.0 * PI / cfg.omega;
    let linear = DissipatorKind::LinearNonRwa { gamma: k.gamma_linear, nbar: n1 };
    let quadratic = DissipatorKind::QuadraticLindblad { gamma: k.gamma_quadratic, nbar: n2 };
    let t_lin = collision_times(&MarkovParams::new(cfg.omega, k.gamma_linear, n1)?, period)
        .first()
        .copied()
        .ok_or_else(|| Error::Domain("no fringe collision within one period".into()))?;
    let vb = cat_visibility(&linear, real(k.alpha), k.phi, cfg.omega, cfg.dim, t_lin, &grid)?;
    let vc = cat_visibility(&quadratic, real(k.alpha), k.phi, cfg.omega, cfg.dim, 0.25 * period, &grid)?;
    for v in [&vb, &vc] {
        v.health.iter().for_each(|h| cons.absorb(h));
        cons.frame(&v.full);
    }
    Ok(mset(&[
        ("linear_visibility", vb.visibility),
        ("quadratic_visibility", vc.visibility),
        ("visibility_ratio", vc.visibility / vb.visibility),
    ]))
}

pub fn check_8(m: &Measured) -> (bool, String) {
    let r = get(m, "visibility_ratio");
    (
        r >= 4.0,
        format!(
            "visibility quadratic {:.4} / linear {:.4} = {r:.3} (need ≥ 4)",
            get(m, "quadratic_visibility"),
            get(m, "linear_visibility")
        ),
    )
}

// ---- criterion 9

fn measure_9(cons: &Conservation, failed_runs: usize) -> Measured {
    mset(&[
        ("max_trace_error", cons.trace),
        ("max_hermiticity_drift", cons.drift),
        ("max_norm_error", cons.norm),
        ("trajectories", cons.trajectories as f64),
        ("frames", cons.frames as f64),
        ("failed_runs", failed_runs as f64),
    ])
}

pub fn check_9(m: &Measured) -> (bool, String) {
    let (tr, dr, nm) = (get(m, "max_trace_error"), get(m, "max_hermiticity_drift"), get(m, "max_norm_error"));
    let failed = get(m, "failed_runs");
    let ok = tr <= 1e-9 && dr <= 1e-10 && nm <= 1e-6 && failed == 0.0 && get(m, "trajectories") > 0.0;
    (
        ok,
        format!(
            "{} trajectories, {} frames, {failed} runs aborted: trace {tr:.1e}, drift {dr:.1e}, ∫P {nm:.1e}",
            get(m, "trajectories"),
            get(m, "frames")
        ),
    )
}

// ---- criterion 10

fn measure_10() -> Result<Measured> {
    let kt = 1.0;
    let modes = frequency_comb(1.0, 0.9, 201, 0.01, |w| bose_occupation(w, kt).unwrap_or(0.0));
    let tau = correlation_time(&modes).ok_or_else(|| Error::Domain("degenerate comb".into()))?;
    let g0 = early_time_constant(&modes);
    let coeffs = relaxation_coefficients(&BathModel::DiscreteModes { modes }, 1.0)?;
    let times = linspace(0.0, 0.1 * tau, 21);
    let tr = evolve_cumulants(BranchCumulants::coherent(real(1.0)), &coeffs, 1.0, &times)?;
    let (mut worst, mut k11) = (0.0f64, 0.0f64);
    for (k, &t) in tr.iter().zip(&times).skip(1) {
        let law = g0 * t * t;
        worst = worst.max(((k.variance().re - 0.5) - law).abs() / law);
        k11 = k.k11.re / law;
    }
    let n = times.len();
    let exponent = ((tr[n - 1].variance().re - 0.5) / (tr[n - 2].variance().re - 0.5)).ln() / (times[n - 1] / times[n - 2]).ln();
    Ok(mset(&[
        ("gamma0", g0),
        ("correlation_time", tau),
        ("max_relative_error", worst),
        ("k11_over_law_at_end", k11),
        ("broadening_exponent", exponent),
    ]))
}

pub fn check_10(m: &Measured) -> (bool, String) {
    let e = get(m, "max_relative_error");
    (
        e <= 0.05,
        format!(
            "max |(V−½) − Γ₀t²| / Γ₀t² = {e:.3} (need ≤ 0.05); K11/Γ₀t² = {:.4}, V−½ ∝ t^{:.2}",
            get(m, "k11_over_law_at_end"),
            get(m, "broadening_exponent")
        ),
    )
}

// ---- driver

pub fn check(id: u8, m: &Measured) -> (bool, String) {
    match id {
        1 => check_1(m),
        2 => check_2(m),
        3 => check_3(m),
        4 => check_4(m),
        5 => check_5(m),
        6 => check_6(m),
        7 => check_7(m),
        8 => check_8(m),
        9 => check_9(m),
        10 => check_10(m),
        _ => (false, format!("no criterion {id}")),
    }
}

fn finish(id: u8, measured: Result<Measured>, start: Instant) -> CriterionResult {
    let seconds = start.elapsed().as_secs_f64();
    let name = NAMES[id as usize - 1];
    match measured {
        Ok(measured) => {
            let (passed, detail) = check(id, &measured);
            CriterionResult { id, name, passed, measured, detail, seconds }
        }
        Err(e) => CriterionResult { id, name, passed: false, measured: Measured::new(), detail: format!("run failed: {e}"), seconds },
    }
}

pub fn run_acceptance(opts: &AcceptanceOptions) -> AcceptanceReport {
    let mut cons = Conservation::default();
    let mut criteria = Vec::with_capacity(10);
    for id in 1..=8u8 {
        let start = Instant::now();
        let m = match id {
            1 => measure_1(opts, &mut cons),
            2 => measure_2(opts, &mut cons),
            3 => measure_3(),
            4 => measure_4(opts, &mut cons),
            5 => measure_5(),
            6 => measure_6(&mut cons),
            7 => measure_7(opts, &mut cons),
            _ => measure_8(opts, &mut cons),
        };
        let r = finish(id, m, start);
        log::debug!("{}", r.line());
        criteria.push(r);
    }
    let failed_runs = criteria.iter().filter(|c| c.measured.is_empty()).count();
    let start = Instant::now();
    criteria.push(finish(9, Ok(measure_9(&cons, failed_runs)), start));
    let start = Instant::now();
    criteria.push(finish(10, measure_10(), start));
    let all_passed = criteria.iter().all(|c| c.passed);
    AcceptanceReport { criteria, all_passed }
}

/// Options from `key=value` overrides; `fock_dim` is the only key.
pub fn parse_options(overrides: &[String]) -> Result<AcceptanceOptions> {
    let mut opts = AcceptanceOptions::default();
    for o in overrides {
        match o.split_once('=') {
            Some(("fock_dim", v)) => {
                let d: usize = v.trim().parse().map_err(|_| Error::Config(format!("fock_dim must be an integer, got {v:?}")))?;
                if d < 2 {
                    return Err(Error::Config(format!("fock_dim must be ≥ 2, got {d}")));
                }
                opts.fock_dim = Some(d);
            }
            _ => return Err(Error::Config(format!("unknown acceptance override {o:?}; expected fock_dim=<n>"))),
        }
    }
    Ok(opts)
}

/// Write the report as `acceptance.json`, or as long-format
/// `acceptance.csv` with columns `criterion,name,passed,quantity,value`.
pub fn write_report(report: &AcceptanceReport, dir: &Path, format: Format) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = match format {
        Format::Json => {
            let p = dir.join("acceptance.json");
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            std::fs::write(&p, text)?;
            p
        }
        Format::Csv => {
            let p = dir.join("acceptance.csv");
            let mut w = csv::Writer::from_path(&p)?;
            w.write_record(["criterion", "name", "passed", "quantity", "value"])?;
            for c in &report.criteria {
                let (id, passed) = (c.id.to_string(), c.passed.to_string());
                w.write_record([id.as_str(), c.name, &passed, "seconds", &c.seconds.to_string()])?;
                for (k, v) in &c.measured {
                    w.write_record([id.as_str(), c.name, &passed, k, &v.to_string()])?;
                }
            }
            w.flush()?;
            p
        }
    };
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn options_from_overrides() {
        assert_eq!(parse_options(&["fock_dim=8".into()]).unwrap().fock_dim, Some(8));
        assert_eq!(parse_options(&[]).unwrap(), AcceptanceOptions::default());
        for bad in ["fock_dim=x", "fock_dim=1", "dim=8", "fock_dim"] {
            assert!(matches!(parse_options(&[bad.into()]), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn unshifted_reference_fails_frequency_check() {
        let good = mset(&[("frequency", 0.9683), ("reference", 0.968246), ("run_seconds", 1.0)]);
        assert!(check_1(&good).0);
        let tampered = mset(&[("frequency", 0.9683), ("reference", 1.0), ("run_seconds", 1.0)]);
        assert!(!check_1(&tampered).0);
        let slow = mset(&[("frequency", 0.9683), ("reference", 0.968246), ("run_seconds", 11.0)]);
        assert!(!check_1(&slow).0);
    }

    #[test]
    fn missing_measurements_fail() {
        for id in 1..=10 {
            assert!(!check(id, &Measured::new()).0, "criterion {id}");
        }
    }

    #[test]
    fn oracle_rate_is_four_gamma() {
        assert!((two_quantum_rate_oracle(0.3, 6).unwrap() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn aborted_runs_fail_the_conservation_suite() {
        let cons = Conservation { trace: 1e-14, drift: 1e-17, norm: 1e-9, trajectories: 3, frames: 1 };
        assert!(check_9(&measure_9(&cons, 0)).0);
        assert!(!check_9(&measure_9(&cons, 1)).0);
    }

    #[test]
    fn closed_form_criterion_passes() {
        assert!(check_3(&measure_3().unwrap()).0);
    }
}
