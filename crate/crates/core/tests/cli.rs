use std::path::Path;
use std::process::Command;

use phase_relax::scenarios::figures::{run_fig2, Fig2Config};
use phase_relax::scenarios::output::read_series_csv;
use phase_relax::scenarios::RunOutput;

fn cli(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_phase-relax"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (o.status.code().expect("exit code"), String::from_utf8_lossy(&o.stdout).into_owned())
}

const SCENARIO: &str = r#"
id = "small"
[bath]
kind = "linear_markov"
gamma = 0.05
nbar = 0.0
[initial]
kind = "coherent"
alpha = 2.0
[solver]
kind = "fock"
dissipator = "linear_non_rwa"
dim = 30
[time]
t_end = 3.0
points = 31
frames = 2
"#;

#[test]
fn figure_json_matches_library_run() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = cli(&["fig2", "--format", "json", "--set", "frames=2"], dir.path());
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dir.path().join("fig2.json")).unwrap();
    let from_cli: RunOutput = serde_json::from_str(&text).unwrap();
    let direct = run_fig2(&Fig2Config::preset(&["frames=2".into()]).unwrap()).unwrap();
    assert_eq!(from_cli, direct);
}

#[test]
fn scenario_csv_and_gnuplot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SCENARIO).unwrap();
    let (code, stdout) = cli(&["run", cfg.to_str().unwrap(), "--gnuplot"], dir.path());
    assert_eq!(code, 0);
    assert!(stdout.contains("max_trace_error"));
    for f in ["small_series.csv", "small_density_frames.csv", "small_summary.csv", "small.gp"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let series = read_series_csv(std::fs::File::open(dir.path().join("small_series.csv")).unwrap()).unwrap();
    assert!(series.iter().any(|s| s.name == "parity" && s.t.len() == 31));
    let frames = std::fs::read_to_string(dir.path().join("small_density_frames.csv")).unwrap();
    assert!(frames.starts_with("t,Q,P\n"));

    let first = std::fs::read(dir.path().join("small_series.csv")).unwrap();
    assert_eq!(cli(&["run", cfg.to_str().unwrap()], dir.path()).0, 0);
    assert_eq!(std::fs::read(dir.path().join("small_series.csv")).unwrap(), first);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SCENARIO).unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(cli(&["fig1", "--set", "gamma=-0.1"], dir.path()).0, 1);
    assert_eq!(cli(&["fig1", "--set", "colour=3"], dir.path()).0, 1);
    assert_eq!(cli(&["nonsense"], dir.path()).0, 1);
    assert_eq!(cli(&["run", "/definitely/missing.toml"], dir.path()).0, 1);
    assert_eq!(cli(&["fig3", "--format", "json", "--gnuplot"], dir.path()).0, 1);
    assert_eq!(cli(&["run", c, "--set", "solver.dim=6"], dir.path()).0, 2);
    assert_eq!(cli(&["acceptance", "--set", "dim=8"], dir.path()).0, 1);
}

#[test]
fn acceptance_reports_and_gates() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = cli(&["acceptance"], dir.path());
    let lines: Vec<&str> = stdout.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert_eq!(lines.len(), 10, "{stdout}");
    let all_pass = lines.iter().all(|l| l.starts_with("PASS"));
    assert_eq!(code, if all_pass { 0 } else { 3 });
    let csv = std::fs::read_to_string(dir.path().join("acceptance.csv")).unwrap();
    assert!(csv.starts_with("criterion,name,passed,quantity,value\n"));

    let (code, stdout) = cli(&["acceptance", "--set", "fock_dim=8", "--format", "json"], dir.path());
    assert_eq!(code, 3);
    assert!(stdout.contains("FAIL [ 8]"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("acceptance.json")).unwrap()).unwrap();
    assert_eq!(report["all_passed"], false);
}
