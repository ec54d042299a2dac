//! Linear versus two-quantum baths: envelope shapes of a displaced packet and
//! fringe visibility of a cat at its first collision.

use phase_relax::scenarios::figures::{run_fig4, Fig4Config};

fn main() -> phase_relax::Result<()> {
    let out = run_fig4(&Fig4Config::preset(&["frames=3".into()])?)?;
    for (k, v) in &out.summary {
        println!("{k:36} {v:.6}");
    }
    Ok(())
}
