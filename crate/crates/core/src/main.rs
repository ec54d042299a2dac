use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phase_relax::scenarios::acceptance::{parse_options, run_acceptance, write_report};
use phase_relax::scenarios::config::load;
use phase_relax::scenarios::figures::{
    run_fig1, run_fig2, run_fig3, run_fig4, Fig1Config, Fig2Config, Fig3Config, Fig4Config,
};
use phase_relax::scenarios::{run_config, write_output, Format, RunOutput, ScenarioConfig};

/// Phase-sensitive relaxation of an oscillator: figure presets, scenario runs and acceptance checks.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override a configuration value, e.g. `--set gamma=0.2` or `--set bath.kt=1.5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write a gnuplot script next to the CSV files.
    #[arg(long, global = true)]
    gnuplot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Coherent packet in a thermal phase-sensitive bath.
    Fig1,
    /// Cat-state fringes and their decay.
    Fig2,
    /// Interference at Q = 0: phase-sensitive, RWA and early-time curves.
    Fig3,
    /// Linear versus two-quantum baths.
    Fig4,
    /// Run a scenario described by a TOML file.
    Run { config: PathBuf },
    /// Run the acceptance criteria.
    Acceptance,
}

fn write(cli: &Cli, run: &RunOutput) -> phase_relax::Result<()> {
    for w in &run.warnings {
        log::warn!("{w}");
    }
    for (k, v) in &run.summary {
        println!("{k} = {v:.6e}");
    }
    for p in write_output(run, &cli.out, cli.format, cli.gnuplot)? {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

fn execute(cli: &Cli) -> phase_relax::Result<ExitCode> {
    if cli.gnuplot && cli.format != Format::Csv {
        return Err(phase_relax::Error::Config("--gnuplot scripts read CSV files; use --format csv".into()));
    }
    let run = match &cli.command {
        Command::Fig1 => run_fig1(&Fig1Config::preset(&cli.set)?)?,
        Command::Fig2 => run_fig2(&Fig2Config::preset(&cli.set)?)?,
        Command::Fig3 => run_fig3(&Fig3Config::preset(&cli.set)?)?,
        Command::Fig4 => run_fig4(&Fig4Config::preset(&cli.set)?)?,
        Command::Run { config } => run_config(&load::<ScenarioConfig>(config, &cli.set)?)?,
        Command::Acceptance => {
            let report = run_acceptance(&parse_options(&cli.set)?);
            for c in &report.criteria {
                println!("{}", c.line());
            }
            let p = write_report(&report, &cli.out, cli.format)?;
            log::info!("wrote {}", p.display());
            return Ok(if report.all_passed { ExitCode::SUCCESS } else { ExitCode::from(3) });
        }
    };
    write(cli, &run)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
