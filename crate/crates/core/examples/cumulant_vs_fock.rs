//! The Gaussian cumulant solution and a truncated Fock density matrix evolved
//! under the same linear bath agree on the first two moments.

use num_complex::Complex64;
use phase_relax::cumulant::{evolve_cumulants, BranchCumulants, MarkovParams};
use phase_relax::fock::{coherent_density_matrix, integrate, observables, DissipatorKind, FockOptions};
use phase_relax::scenarios::config::linspace;

fn main() -> phase_relax::Result<()> {
    let (gamma, nbar, alpha) = (0.05, 0.5, Complex64::new(1.0, 0.5));
    let p = MarkovParams::new(1.0, gamma, nbar)?;
    let times = linspace(0.0, 4.0 * p.period(), 9);
    let cum = evolve_cumulants(BranchCumulants::coherent(alpha), &p.coefficients(), 1.0, &times)?;
    let s0 = coherent_density_matrix(alpha, 30)?;
    let fock = integrate(&DissipatorKind::LinearNonRwa { gamma, nbar }, &s0, 1.0, &times, FockOptions::default())?;
    println!("{:>7} {:>11} {:>11} {:>9} {:>9}", "t", "Q cumulant", "Q Fock", "V cum", "V Fock");
    for ((t, k), s) in times.iter().zip(&cum).zip(&fock.states) {
        let o = observables(s, *t);
        println!("{t:7.3} {:11.7} {:11.7} {:9.6} {:9.6}", k.center().re, o.mean_q, k.variance().re, o.variance);
    }
    println!("largest trace error {:.1e}", fock.health.max_trace_error);
    Ok(())
}
