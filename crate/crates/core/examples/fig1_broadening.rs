//! Coherent packet in a warm phase-sensitive bath: the width saturates at ½ + n
//! while oscillating at twice the shifted frequency.

use phase_relax::scenarios::figures::{run_fig1, Fig1Config};

fn main() -> phase_relax::Result<()> {
    let out = run_fig1(&Fig1Config::preset(&["frames=5".into()])?)?;
    let v = out.series("variance").expect("variance series");
    for (t, v) in v.t.iter().zip(&v.values).step_by(40) {
        println!("t = {t:7.3}  V = {v:.5}");
    }
    for key in ["variance_limit", "variance_spectral_peak", "two_effective_frequency"] {
        println!("{key}: {:.5}", out.scalar(key).unwrap());
    }
    Ok(())
}
