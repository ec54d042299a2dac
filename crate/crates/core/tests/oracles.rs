//! Solver outputs against independently computed references.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use num_complex::Complex64;
use phase_relax::bath::{bose_occupation, early_time_constant, frequency_comb, gamma_functions, relaxation_coefficients, BathMode, BathModel};
use phase_relax::cumulant::{evolve_superposition, make_cat, MarkovParams};
use phase_relax::fock::{
    cat_density_matrix, coherent_density_matrix, integrate, position_density, DissipatorKind, FockOptions,
};
use phase_relax::scenarios::config::linspace;
use phase_relax::wavepacket::{branches_at, density_frame, interference_term, split_frames};

/// Composite Simpson rule for ∫₀ᵗ f.
fn simpson(f: impl Fn(f64) -> Complex64, t: f64, n: usize) -> Complex64 {
    let h = t / n as f64;
    let mut s = f(0.0) + f(t);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

#[test]
fn gamma_functions_match_quadrature() {
    let modes = vec![
        BathMode { omega: 0.4, coupling: 0.3, occupation: 1.2 },
        BathMode { omega: 1.0, coupling: 0.1, occupation: 0.5 },
        BathMode { omega: 1.7, coupling: 0.2, occupation: 0.05 },
    ];
    let w = 1.0;
    for t in [0.3, 2.0, 9.0] {
        let g = gamma_functions(&modes, w, t);
        let sum = |occ: &dyn Fn(&BathMode) -> f64, sign: f64| {
            simpson(
                |tau| modes.iter().map(|m| Complex64::from_polar(m.coupling * m.coupling * occ(m), -(m.omega + sign * w) * tau)).sum(),
                t,
                4000,
            )
        };
        let refs = [
            (g.gamma_n, sum(&|m| m.occupation, -1.0)),
            (g.gamma_n1, sum(&|m| m.occupation + 1.0, -1.0)),
            (g.tilde_n, sum(&|m| m.occupation, 1.0)),
            (g.tilde_n1, sum(&|m| m.occupation + 1.0, 1.0)),
        ];
        for (got, want) in refs {
            assert!((got - want).norm() <= 1e-10 * want.norm().max(1e-3), "t = {t}: {got} vs {want}");
        }
    }
}

#[test]
fn dense_comb_reaches_the_markov_plateau() {
    let (count, half_width, k, kt) = (201, 0.5, 0.01, 1.0);
    let modes = frequency_comb(1.0, half_width, count, k, |w| bose_occupation(w, kt).unwrap());
    let spacing = 2.0 * half_width / (count - 1) as f64;
    let n = bose_occupation(1.0, kt).unwrap();
    // between the correlation time 1/(2·half_width) and the recurrence 2π/spacing
    for t in [100.0, 200.0, 400.0] {
        let g = gamma_functions(&modes, 1.0, t);
        assert_relative_eq!(g.gamma_n1.re, PI * k * k * (n + 1.0) / spacing, max_relative = 0.05);
        assert_relative_eq!(g.gamma_n.re, PI * k * k * n / spacing, max_relative = 0.05);
    }
}

#[test]
fn relaxation_functions_start_as_the_early_ramp() {
    let modes = frequency_comb(1.0, 0.9, 201, 0.01, |w| bose_occupation(w, 1.0).unwrap());
    let g0 = early_time_constant(&modes);
    let k2w: f64 = modes.iter().map(|m| m.coupling * m.coupling * m.omega).sum();
    let c = relaxation_coefficients(&BathModel::DiscreteModes { modes }, 1.0).unwrap();
    let t = 1e-3;
    let (mu, nu) = c.at(t);
    assert_relative_eq!(nu.re, g0 * t, max_relative = 1e-5);
    assert_relative_eq!(mu.im, -k2w * t * t, max_relative = 1e-3);
    assert!(mu.re.abs() < 1e-3 * k2w * t * t);
}

#[test]
fn coherent_fock_density_is_the_gaussian() {
    let alpha = Complex64::new(1.3, -0.7);
    let grid = linspace(-8.0, 8.0, 161);
    let f = position_density(&coherent_density_matrix(alpha, 40).unwrap(), &grid, 0.0);
    for (q, p) in grid.iter().zip(&f.density) {
        let g = (-(q - 2.0 * alpha.re).powi(2) / 2.0).exp() / (2.0 * PI).sqrt();
        assert!((p - g).abs() < 1e-10, "Q = {q}");
    }
}

fn fock_vs_branches(alpha: Complex64, phi: f64, gamma: f64, nbar: f64, tol: f64) {
    let p = MarkovParams::new(1.0, gamma, nbar).unwrap();
    let times = linspace(0.0, 0.75 * p.period(), 4);
    let ev = evolve_superposition(&make_cat(alpha, phi).unwrap(), &p.coefficients(), 1.0, &times).unwrap();
    let kind = DissipatorKind::LinearNonRwa { gamma, nbar };
    let tr = integrate(&kind, &cat_density_matrix(alpha, phi, 40).unwrap(), 1.0, &times, FockOptions::default()).unwrap();
    let grid = linspace(-9.0, 9.0, 181);
    for (i, &t) in times.iter().enumerate() {
        let branch = density_frame(&branches_at(&ev, i), &grid, t).unwrap();
        let fock = position_density(&tr.states[i], &grid, t);
        for ((q, a), b) in grid.iter().zip(&branch.density).zip(&fock.density) {
            assert!((a - b).abs() < tol, "t = {t}, Q = {q}: branches {a}, Fock {b}");
        }
    }
}

#[test]
fn free_cat_density_matches_fock_evolution() {
    fock_vs_branches(Complex64::new(2.0, 0.0), PI / 2.0, 0.0, 0.0, 1e-8);
    fock_vs_branches(Complex64::new(1.2, 0.9), 0.4, 0.0, 0.0, 1e-8);
}

#[test]
fn damped_cat_density_matches_fock_evolution() {
    fock_vs_branches(Complex64::new(1.5, 0.0), 0.0, 0.05, 0.3, 1e-6);
    fock_vs_branches(Complex64::new(1.0, 0.5), 1.0, 0.1, 0.0, 1e-6);
}

#[test]
fn closed_form_interference_matches_branch_sum() {
    let (alpha, phi) = (Complex64::new(2.0, 0.0), 0.8);
    let p = MarkovParams::new(1.0, 0.02, 0.4).unwrap();
    let times = linspace(0.0, 2.0 * p.period(), 9);
    let ev = evolve_superposition(&make_cat(alpha, phi).unwrap(), &p.coefficients(), 1.0, &times).unwrap();
    let grid = linspace(-3.0, 3.0, 61);
    for (i, &t) in times.iter().enumerate() {
        let (_, inter) = split_frames(&branches_at(&ev, i), &grid, t).unwrap();
        for (q, v) in grid.iter().zip(&inter.density) {
            assert!((v - interference_term(alpha, phi, &p, *q, t)).abs() < 1e-9, "t = {t}, Q = {q}");
        }
    }
}
