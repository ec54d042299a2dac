//! Free-form scenario execution for `run <config>`.

use num_complex::Complex64;

use crate::bath::{relaxation_coefficients, BathModel};
use crate::cumulant::{analytic_markov, early_time, evolve_superposition, make_cat, MarkovParams, SuperpositionState};
use crate::error::{Error, Result};
use crate::fock::{
    cat_density_matrix, coherent_density_matrix, integrate, position_density, DissipatorKind,
    FockDensityMatrix, FockOptions,
};
use crate::wavepacket::{
    branches_at, density_frame, interference_term, significance_ratio, split_frames, GaussianBranchDensity,
    WavepacketFrame,
};

use super::config::{frame_indices, FockKindName, InitialConfig, ScenarioConfig, SolverConfig};
use super::output::{FrameStack, RunOutput, Series};

pub fn run_config(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let bath = cfg.validate()?;
    let mut out = match &cfg.solver {
        SolverConfig::Cumulant => run_cumulant(cfg, &bath)?,
        SolverConfig::Analytic => run_analytic(cfg, &bath)?,
        SolverConfig::Fock { dissipator, dim } => run_fock(cfg, &bath, *dissipator, *dim)?,
    };
    out.id = cfg.id.clone();
    Ok(out)
}

fn superposition(initial: &InitialConfig) -> Result<SuperpositionState> {
    match initial {
        InitialConfig::Coherent { alpha, alpha_im } => Ok(SuperpositionState::coherent(Complex64::new(*alpha, *alpha_im))),
        InitialConfig::Cat { alpha, alpha_im, phi } => make_cat(Complex64::new(*alpha, *alpha_im), *phi),
        InitialConfig::Number { .. } => Err(crate::cumulant::require_gaussian("a number state")),
    }
}

/// `(⟨Q⟩, Var(Q)/2)` of a weighted branch sum.
fn branch_moments(branches: &[GaussianBranchDensity]) -> (f64, f64) {
    let m1: Complex64 = branches.iter().map(|b| b.weight * b.center).sum();
    let m2: Complex64 = branches.iter().map(|b| b.weight * (b.center * b.center + 2.0 * b.variance)).sum();
    (m1.re, 0.5 * (m2.re - m1.re * m1.re))
}

fn run_cumulant(cfg: &ScenarioConfig, bath: &BathModel) -> Result<RunOutput> {
    let coeffs = relaxation_coefficients(bath, cfg.omega)?;
    let times = cfg.time.grid();
    let grid = cfg.q_grid.values();
    let state = superposition(&cfg.initial)?;
    let ev = evolve_superposition(&state, &coeffs, cfg.omega, &times)?;
    let mut mean = Vec::with_capacity(times.len());
    let mut var = Vec::with_capacity(times.len());
    let mut inter = Vec::new();
    let is_cat = matches!(cfg.initial, InitialConfig::Cat { .. });
    for (i, &t) in times.iter().enumerate() {
        let b = branches_at(&ev, i);
        let (m, v) = branch_moments(&b);
        mean.push(m);
        var.push(v);
        if is_cat {
            inter.push(split_frames(&b, &[0.0], t)?.1.density[0]);
        }
    }
    let mut out = RunOutput::new(&cfg.id);
    let mut frames = Vec::new();
    let mut worst_norm: f64 = 0.0;
    for i in frame_indices(times.len(), cfg.time.frames) {
        let f = density_frame(&branches_at(&ev, i), &grid, times[i])?;
        worst_norm = worst_norm.max((f.integral() - 1.0).abs());
        frames.push(f);
    }
    out.put("max_norm_error", worst_norm);
    out.series.push(Series::new("mean_q", times.clone(), mean));
    out.series.push(Series::new("variance", times.clone(), var));
    if is_cat {
        out.series.push(Series::new("interference_q0", times, inter));
    }
    out.stacks.push(FrameStack { name: "density".into(), frames });
    Ok(out)
}

fn gaussian_frame(center: f64, v: f64, grid: &[f64], t: f64) -> Result<WavepacketFrame> {
    let b = GaussianBranchDensity {
        center: Complex64::new(center, 0.0),
        variance: Complex64::new(v, 0.0),
        weight: Complex64::new(1.0, 0.0),
        diagonal: true,
    };
    density_frame(&[b], grid, t)
}

fn run_analytic(cfg: &ScenarioConfig, bath: &BathModel) -> Result<RunOutput> {
    let times = cfg.time.grid();
    let grid = cfg.q_grid.values();
    let idx = frame_indices(times.len(), cfg.time.frames);
    let mut out = RunOutput::new(&cfg.id);
    let alpha = cfg.initial.amplitude().ok_or_else(|| Error::Config("closed forms need a coherent amplitude".into()))?;
    let mut frames = Vec::new();
    match (bath, &cfg.initial) {
        (BathModel::LinearMarkov { gamma, nbar }, InitialConfig::Coherent { .. }) => {
            let sol: Vec<_> = times.iter().map(|&t| analytic_markov(alpha, *gamma, cfg.omega, *nbar, t)).collect::<Result<_>>()?;
            for &i in &idx {
                frames.push(gaussian_frame(sol[i].q, sol[i].v, &grid, times[i])?);
            }
            out.series.push(Series::new("mean_q", times.clone(), sol.iter().map(|s| s.q).collect()));
            out.series.push(Series::new("variance", times, sol.iter().map(|s| s.v).collect()));
        }
        (BathModel::LinearMarkov { gamma, nbar }, InitialConfig::Cat { phi, .. }) => {
            let p = MarkovParams::new(cfg.omega, *gamma, *nbar)?;
            let n2 = crate::cumulant::cat_norm_squared(alpha, *phi);
            for &i in &idx {
                let t = times[i];
                let s = analytic_markov(alpha, *gamma, cfg.omega, *nbar, t)?;
                let plus = gaussian_frame(s.q, s.v, &grid, t)?;
                let minus = gaussian_frame(-s.q, s.v, &grid, t)?;
                let density = grid
                    .iter()
                    .zip(plus.density.iter().zip(&minus.density))
                    .map(|(q, (a, b))| (a + b) / n2 + interference_term(alpha, *phi, &p, *q, t))
                    .collect();
                frames.push(WavepacketFrame { time: t, grid: grid.clone(), density, coarse_grid: false });
            }
            let inter = times.iter().map(|&t| interference_term(alpha, *phi, &p, 0.0, t)).collect();
            let sig = times.iter().map(|&t| significance_ratio(alpha, &p, t)).collect();
            let var = times.iter().map(|&t| p.variance(t)).collect();
            out.series.push(Series::new("interference_q0", times.clone(), inter));
            out.series.push(Series::new("significance", times.clone(), sig));
            out.series.push(Series::new("branch_variance", times, var));
        }
        (BathModel::EarlyTime { gamma0 }, InitialConfig::Coherent { .. }) => {
            let sol: Vec<(f64, f64)> = times.iter().map(|&t| early_time(alpha, *gamma0, cfg.omega, t)).collect();
            for &i in &idx {
                frames.push(gaussian_frame(sol[i].0, sol[i].1, &grid, times[i])?);
            }
            out.series.push(Series::new("mean_q", times.clone(), sol.iter().map(|s| s.0).collect()));
            out.series.push(Series::new("variance", times, sol.iter().map(|s| s.1).collect()));
        }
        _ => unreachable!("pairing validated"),
    }
    out.stacks.push(FrameStack { name: "density".into(), frames });
    Ok(out)
}

fn run_fock(cfg: &ScenarioConfig, bath: &BathModel, name: FockKindName, dim: usize) -> Result<RunOutput> {
    let kind = match (name, bath) {
        (FockKindName::LinearNonRwa, BathModel::LinearMarkov { gamma, nbar }) => {
            DissipatorKind::LinearNonRwa { gamma: *gamma, nbar: *nbar }
        }
        (FockKindName::LinearRwa, BathModel::LinearMarkov { gamma, nbar }) => DissipatorKind::LinearRwa { gamma: *gamma, nbar: *nbar },
        (FockKindName::QuadraticLindblad, BathModel::QuadraticMarkov { gamma, nbar }) => {
            DissipatorKind::QuadraticLindblad { gamma: *gamma, nbar: *nbar }
        }
        (FockKindName::QuadraticLiteral, BathModel::QuadraticMarkov { gamma, nbar }) => {
            DissipatorKind::QuadraticLiteral { gamma: *gamma, nbar: *nbar }
        }
        (FockKindName::TimeDependent, BathModel::DiscreteModes { .. }) => {
            DissipatorKind::TimeDependent { coefficients: relaxation_coefficients(bath, cfg.omega)? }
        }
        _ => unreachable!("pairing validated"),
    };
    let s0 = match &cfg.initial {
        InitialConfig::Coherent { alpha, alpha_im } => coherent_density_matrix(Complex64::new(*alpha, *alpha_im), dim)?,
        InitialConfig::Cat { alpha, alpha_im, phi } => cat_density_matrix(Complex64::new(*alpha, *alpha_im), *phi, dim)?,
        InitialConfig::Number { k } => FockDensityMatrix::number_state(*k, dim)?,
    };
    let times = cfg.time.grid();
    let grid = cfg.q_grid.values();
    let tr = integrate(&kind, &s0, cfg.omega, &times, FockOptions::default())?;
    let obs = tr.observables();
    let mut out = RunOutput::new(&cfg.id);
    let col = |f: &dyn Fn(&crate::fock::Observables) -> f64| obs.iter().map(f).collect::<Vec<f64>>();
    out.series.push(Series::new("mean_q", times.clone(), col(&|o| o.mean_q)));
    out.series.push(Series::new("variance", times.clone(), col(&|o| o.variance)));
    out.series.push(Series::new("parity", times.clone(), col(&|o| o.parity)));
    out.series.push(Series::new("purity", times.clone(), col(&|o| o.purity)));
    out.series.push(Series::new("trace", times.clone(), col(&|o| o.trace)));
    out.series.push(Series::new("min_eigenvalue", times.clone(), col(&|o| o.min_eigenvalue)));
    let mut frames = Vec::new();
    for i in frame_indices(times.len(), cfg.time.frames) {
        let f = position_density(&tr.states[i], &grid, times[i]);
        if f.coarse_grid {
            out.warnings.push(format!("frame at t = {} is under-resolved by the Q grid", times[i]));
        }
        frames.push(f);
    }
    let h = tr.health;
    out.put("max_trace_error", h.max_trace_error);
    out.put("max_hermiticity_drift", h.max_hermiticity_drift);
    out.put("max_top_population", h.max_top_population);
    out.put("min_eigenvalue", obs.iter().map(|o| o.min_eigenvalue).fold(f64::INFINITY, f64::min));
    if h.truncation_flagged {
        out.warnings.push(format!("top level population reached {:.3e}", h.max_top_population));
    }
    out.stacks.push(FrameStack { name: "density".into(), frames });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::config::parse_with_overrides;

    const BASE: &str = r#"
id = "t"
[bath]
kind = "linear_markov"
gamma = 0.05
nbar = 0.0
[initial]
kind = "coherent"
alpha = 1.0
[solver]
kind = "cumulant"
[time]
t_end = 6.0
points = 61
frames = 3
[q_grid]
min = -10.0
max = 10.0
points = 801
"#;

    fn run(over: &[&str]) -> Result<RunOutput> {
        let o: Vec<String> = over.iter().map(|s| s.to_string()).collect();
        run_config(&parse_with_overrides(BASE, &o)?)
    }

    #[test]
    fn solvers_agree_on_coherent_markov_run() {
        let c = run(&[]).unwrap();
        let a = run(&["solver.kind=analytic"]).unwrap();
        let f = run(&["solver.kind=fock", "solver.dissipator=linear_non_rwa", "solver.dim=20"]).unwrap();
        for name in ["mean_q", "variance"] {
            let (x, y, z) = (c.series(name).unwrap(), a.series(name).unwrap(), f.series(name).unwrap());
            for i in 0..x.values.len() {
                assert!((x.values[i] - y.values[i]).abs() < 1e-8, "{name}");
                assert!((x.values[i] - z.values[i]).abs() < 1e-5, "{name}");
            }
        }
        assert_eq!(c.stack("density").unwrap().frames.len(), 3);
    }

    #[test]
    fn cat_moments_from_branches_match_fock() {
        let over = ["initial.kind=cat", "initial.phi=0.7", "initial.alpha=1.5"];
        let c = run(&over).unwrap();
        let mut fo = over.to_vec();
        fo.extend(["solver.kind=fock", "solver.dissipator=linear_non_rwa", "solver.dim=30"]);
        let f = run(&fo).unwrap();
        let (x, z) = (c.series("variance").unwrap(), f.series("variance").unwrap());
        for i in 0..x.values.len() {
            assert!((x.values[i] - z.values[i]).abs() < 1e-5, "t = {}", x.t[i]);
        }
        let mut ao = over.to_vec();
        ao.push("solver.kind=analytic");
        let a = run(&ao).unwrap();
        let (ic, ia) = (c.series("interference_q0").unwrap(), a.series("interference_q0").unwrap());
        for i in 0..ic.values.len() {
            assert!((ic.values[i] - ia.values[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn number_state_rejected_by_cumulant_solver() {
        let text = BASE.replace("kind = \"coherent\"\nalpha = 1.0", "kind = \"number\"\nk = 2");
        let r = run_config(&parse_with_overrides(&text, &[]).unwrap());
        assert!(matches!(r, Err(Error::Config(_))), "{r:?}");
        let fock = ["solver.kind=fock".to_string(), "solver.dissipator=linear_rwa".to_string()];
        assert!(run_config(&parse_with_overrides(&text, &fock).unwrap()).is_ok());
    }

    #[test]
    fn identical_configs_give_identical_output() {
        let a = serde_json::to_string(&run(&[]).unwrap()).unwrap();
        let b = serde_json::to_string(&run(&[]).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
