//! A scenario described in TOML, with command-line style overrides, written to
//! a directory as CSV.

use phase_relax::scenarios::config::parse_with_overrides;
use phase_relax::scenarios::{run_config, write_output, Format, ScenarioConfig};

const SCENARIO: &str = r#"
id = "thermal_cat"
omega = 1.0

[bath]
kind = "linear_markov"
gamma = 0.03
kt = 1.5

[initial]
kind = "cat"
alpha = 1.5
phi = 0.0

[solver]
kind = "fock"
dissipator = "linear_non_rwa"
dim = 30

[time]
t_end = 12.0
points = 121
frames = 4
"#;

fn main() -> phase_relax::Result<()> {
    let cfg: ScenarioConfig = parse_with_overrides(SCENARIO, &["bath.gamma=0.05".into()])?;
    let out = run_config(&cfg)?;
    let dir = std::env::temp_dir().join("phase-relax-example");
    for path in write_output(&out, &dir, Format::Csv, true)? {
        println!("{}", path.display());
    }
    let purity = out.series("purity").unwrap();
    println!("purity {:.4} → {:.4}", purity.values[0], purity.values.last().unwrap());
    Ok(())
}
