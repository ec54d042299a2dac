//! Position density of a cat state split into its two-packet mixture and the
//! interference term, written as a `t,Q,P` frame stack.

use num_complex::Complex64;
use phase_relax::cumulant::{evolve_superposition, make_cat, MarkovParams};
use phase_relax::wavepacket::{branches_at, split_frames, write_frames_csv, QGrid};

fn main() -> phase_relax::Result<()> {
    let p = MarkovParams::new(1.0, 0.02, 0.3)?;
    let times = [0.0, 0.25 * p.period(), 0.5 * p.period()];
    let ev = evolve_superposition(&make_cat(Complex64::new(2.0, 0.0), 0.0)?, &p.coefficients(), 1.0, &times)?;
    let grid = QGrid::new(-8.0, 8.0, 801)?.values();
    let mut stack = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let (mix, inter) = split_frames(&branches_at(&ev, i), &grid, t)?;
        println!("t = {t:.3}: ∫mixture {:.6}, max |interference| {:.4}", mix.integral(), inter.max_abs_within(0.0, 8.0));
        stack.push(inter);
    }
    let path = std::env::temp_dir().join("cat_interference_frames.csv");
    write_frames_csv(&stack, std::fs::File::create(&path)?)?;
    println!("wrote {}", path.display());
    Ok(())
}
