use num_complex::Complex64;
use phase_relax::cumulant::{analytic_markov, evolve_cumulants, evolve_superposition, make_cat, BranchCumulants, MarkovParams};
use phase_relax::fock::{liouvillian_apply, DissipatorKind, FockDensityMatrix};
use phase_relax::scenarios::config::{linspace, parse_with_overrides};
use phase_relax::scenarios::output::{read_series_csv, write_series_csv, Series};
use phase_relax::scenarios::{run_config, ScenarioConfig};
use phase_relax::wavepacket::{branch_density, branches_at, density_frame, read_frames_csv, write_frames_csv, WavepacketFrame};
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn markov_variance_never_below_vacuum(gamma in 0.0..0.5f64, nbar in 0.0..3.0f64, t in 0.0..60.0f64, a in -3.0..3.0f64) {
        let s = analytic_markov(Complex64::new(a, 0.3), gamma, 1.0, nbar, t).unwrap();
        prop_assert!(s.v >= 0.5 - 1e-12, "V = {}", s.v);
    }

    #[test]
    fn branch_sum_is_real(re in -2.5..2.5f64, im in -2.5..2.5f64, phi in 0.0..std::f64::consts::TAU, gamma in 0.0..0.2f64, nbar in 0.0..2.0f64, t in 0.0..20.0f64, q in -8.0..8.0f64) {
        prop_assume!(re.hypot(im) > 0.3);
        let p = MarkovParams::new(1.0, gamma, nbar).unwrap();
        let ev = evolve_superposition(&make_cat(Complex64::new(re, im), phi).unwrap(), &p.coefficients(), 1.0, &[0.0, t]).unwrap();
        let total: Complex64 = branches_at(&ev, 1).iter().map(|b| branch_density(q, b).unwrap()).sum();
        prop_assert!(total.im.abs() <= 1e-12 * (1.0 + total.re.abs()), "{total}");
        prop_assert!(total.re >= -1e-12);
    }

    #[test]
    fn conjugate_branch_pairs_mirror(re in -2.0..2.0f64, im in -2.0..2.0f64, br in -2.0..2.0f64, bi in -2.0..2.0f64, t in 0.0..10.0f64) {
        let p = MarkovParams::new(1.0, 0.07, 0.6).unwrap();
        let (a, b) = (Complex64::new(re, im), Complex64::new(br, bi));
        let times = [0.0, t];
        let k = evolve_cumulants(BranchCumulants::initial(a, b), &p.coefficients(), 1.0, &times).unwrap()[1];
        let m = evolve_cumulants(BranchCumulants::initial(b.conj(), a.conj()), &p.coefficients(), 1.0, &times).unwrap()[1];
        prop_assert!((k.center() - m.center().conj()).norm() < 1e-9);
        prop_assert!((k.variance() - m.variance().conj()).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn cat_density_is_normalized(alpha in 0.5..2.5f64, phi in 0.0..std::f64::consts::TAU, gamma in 0.0..0.1f64, nbar in 0.0..1.5f64, t in 0.0..15.0f64) {
        let p = MarkovParams::new(1.0, gamma, nbar).unwrap();
        let ev = evolve_superposition(&make_cat(Complex64::new(alpha, 0.0), phi).unwrap(), &p.coefficients(), 1.0, &[0.0, t]).unwrap();
        let f = density_frame(&branches_at(&ev, 1), &linspace(-16.0, 16.0, 3201), t).unwrap();
        prop_assert!((f.integral() - 1.0).abs() < 1e-6, "{}", f.integral());
    }

    #[test]
    fn generators_are_traceless_and_hermitian(dim in 4usize..12, gamma in 0.0..1.0f64, nbar in 0.0..2.0f64, seed in prop::collection::vec(-1.0..1.0f64, 288), which in 0usize..3) {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for m in 0..dim {
            for n in m..dim {
                let z = Complex64::new(seed[(m * dim + n) % 144], if m == n { 0.0 } else { seed[144 + (n * dim + m) % 144] });
                data[m * dim + n] = z;
                data[n * dim + m] = z.conj();
            }
        }
        let sigma = FockDensityMatrix::from_row_major(dim, data).unwrap();
        let kind = match which {
            0 => DissipatorKind::LinearNonRwa { gamma, nbar },
            1 => DissipatorKind::LinearRwa { gamma, nbar },
            _ => DissipatorKind::QuadraticLindblad { gamma, nbar },
        };
        let d = liouvillian_apply(&kind, 1.0, &sigma, 0.0).unwrap();
        let scale = 1.0 + d.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d.trace().norm() < 1e-12 * scale * dim as f64);
        prop_assert!(d.hermiticity_error() < 1e-12 * scale);
    }

    #[test]
    fn series_csv_round_trips(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 1..40)) {
        let t: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.1).collect();
        let s = vec![Series::new("x", t.clone(), values.clone()), Series::new("y", t, values.iter().map(|v| -v).collect())];
        let mut buf = Vec::new();
        write_series_csv(&s, &mut buf).unwrap();
        prop_assert_eq!(read_series_csv(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn frame_csv_round_trips(density in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 2..30), t0 in -1e3..1e3f64) {
        let grid: Vec<f64> = (0..density.len()).map(|i| -1.0 + i as f64 / 7.0).collect();
        let frames: Vec<WavepacketFrame> = (0..3)
            .map(|k| WavepacketFrame { time: t0 + k as f64, grid: grid.clone(), density: density.clone(), coarse_grid: false })
            .collect();
        let mut buf = Vec::new();
        write_frames_csv(&frames, &mut buf).unwrap();
        prop_assert_eq!(read_frames_csv(buf.as_slice()).unwrap(), frames);
    }

    #[test]
    fn overrides_take_effect(gamma in 0.0..0.9f64, t_end in 0.5..50.0f64) {
        let cfg: ScenarioConfig = parse_with_overrides(SCENARIO, &[format!("bath.gamma={gamma:?}"), format!("time.t_end={t_end:?}")]).unwrap();
        prop_assert_eq!(cfg.time.t_end, t_end);
        let again: ScenarioConfig = parse_with_overrides(&toml::to_string(&cfg).unwrap(), &[]).unwrap();
        prop_assert_eq!(again, cfg);
    }
}

const SCENARIO: &str = r#"
id = "prop"
[bath]
kind = "linear_markov"
gamma = 0.1
nbar = 0.2
[initial]
kind = "cat"
alpha = 1.5
phi = 0.3
[solver]
kind = "cumulant"
[time]
t_end = 5.0
points = 51
frames = 2
[q_grid]
min = -8.0
max = 8.0
points = 161
"#;

#[test]
fn runs_are_deterministic() {
    let cfg: ScenarioConfig = parse_with_overrides(SCENARIO, &[]).unwrap();
    let a = serde_json::to_string(&run_config(&cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&run_config(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}
