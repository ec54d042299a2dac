//! A finite set of bath modes drives the Fock solver through time-dependent
//! relaxation functions; the cumulant solver follows the same moments.

use num_complex::Complex64;
use phase_relax::bath::{relaxation_coefficients, BathMode, BathModel};
use phase_relax::cumulant::{evolve_cumulants, BranchCumulants};
use phase_relax::fock::{coherent_density_matrix, integrate, observables, DissipatorKind, FockOptions};
use phase_relax::scenarios::config::linspace;

fn main() -> phase_relax::Result<()> {
    let modes = vec![
        BathMode { omega: 0.8, coupling: 0.05, occupation: 0.4 },
        BathMode { omega: 1.1, coupling: 0.08, occupation: 0.2 },
        BathMode { omega: 1.6, coupling: 0.04, occupation: 0.1 },
    ];
    let coeffs = relaxation_coefficients(&BathModel::DiscreteModes { modes }, 1.0)?;
    let times = linspace(0.0, 20.0, 11);
    let alpha = Complex64::new(1.0, 0.0);
    let cum = evolve_cumulants(BranchCumulants::coherent(alpha), &coeffs, 1.0, &times)?;
    let kind = DissipatorKind::TimeDependent { coefficients: coeffs };
    let tr = integrate(&kind, &coherent_density_matrix(alpha, 25)?, 1.0, &times, FockOptions::default())?;
    for ((t, k), s) in times.iter().zip(&cum).zip(&tr.states) {
        let o = observables(s, *t);
        println!("t = {t:5.1}  V cumulant {:.6}  V Fock {:.6}  min eigenvalue {:+.2e}", k.variance().re, o.variance, o.min_eigenvalue);
    }
    Ok(())
}
