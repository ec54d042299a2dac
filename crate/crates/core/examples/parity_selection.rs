//! Two-quantum loss only connects levels of equal parity: |1⟩ never decays
//! and |2⟩ empties into |0⟩ at rate 4Γ.

use phase_relax::fock::{integrate, DissipatorKind, FockDensityMatrix, FockOptions};
use phase_relax::scenarios::config::linspace;

fn main() -> phase_relax::Result<()> {
    let kind = DissipatorKind::QuadraticLindblad { gamma: 0.5, nbar: 0.0 };
    let times = linspace(0.0, 3.0, 7);
    for k in [1, 2, 3] {
        let tr = integrate(&kind, &FockDensityMatrix::number_state(k, 8)?, 1.0, &times, FockOptions::default())?;
        println!("start in |{k}⟩");
        for (t, s) in times.iter().zip(&tr.states) {
            let p = s.populations();
            println!("  t = {t:.1}  p0 {:.5}  p1 {:.5}  p2 {:.5}  p3 {:.5}", p[0], p[1], p[2], p[3]);
        }
    }
    Ok(())
}
