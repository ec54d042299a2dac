//! A dense comb of bath modes: the memory integrals rise over the correlation
//! time and then sit on a plateau that a constant Markov rate describes.

use std::f64::consts::PI;

use phase_relax::bath::{bose_occupation, correlation_time, frequency_comb, gamma_functions};

fn main() -> phase_relax::Result<()> {
    let (count, half_width, k, kt) = (201, 0.9, 0.01, 1.0);
    let modes = frequency_comb(1.0, half_width, count, k, |w| bose_occupation(w, kt).unwrap_or(0.0));
    let spacing = 2.0 * half_width / (count - 1) as f64;
    let plateau = PI * k * k * (bose_occupation(1.0, kt)? + 1.0) / spacing;
    println!("correlation time {:.3}, plateau {plateau:.5}", correlation_time(&modes).unwrap());
    for t in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 60.0] {
        let g = gamma_functions(&modes, 1.0, t);
        println!("t = {t:5.1}  Re γ_(n+1) = {:.5}", g.gamma_n1.re);
    }
    Ok(())
}
