use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use alip_drs_cli::commands::{self, Overrides, DEFAULT_GRID_DA, DEFAULT_GRID_DT};
use alip_drs_cli::{CliError, EXIT_OK, EXIT_USAGE};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// Bipedal walking on a swaying rigid surface: closed-loop simulation,
/// stability certificates and uncertainty sweeps.
#[derive(Parser, Debug)]
#[command(name = "alip-drs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Source {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: case_a..case_d, exp_a..exp_d.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Override the simulated time, s.
    #[arg(long, value_name = "SECONDS")]
    duration: Option<f64>,
    /// Override the random seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario; writes trace.csv, metrics.json and status.json.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Print monodromy eigenvalues, verdicts and periodic orbits as JSON.
    Stability {
        #[command(flatten)]
        source: Source,
    },
    /// Perturb the planner's belief of the sagittal surface motion over a
    /// grid; writes sweep.csv.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        /// Amplitude offsets, m, comma separated.
        #[arg(long, value_name = "LIST")]
        grid_da: Option<String>,
        /// Time shifts, s, comma separated.
        #[arg(long, value_name = "LIST")]
        grid_dt: Option<String>,
    },
    /// Print the resolved scenario as TOML.
    PrintConfig {
        #[command(flatten)]
        source: Source,
    },
}

fn load(source: &Source) -> Result<alip_drs_cli::config::RunConfig, CliError> {
    let mut cfg = commands::load_config(source.config.as_deref(), source.preset.as_deref())?;
    commands::apply_overrides(
        &mut cfg,
        &Overrides {
            duration: source.duration,
            seed: source.seed,
        },
    );
    Ok(cfg)
}

fn grid(flag: &str, list: Option<&str>, default: &[f64]) -> Result<Vec<f64>, CliError> {
    let values = match list {
        Some(l) => commands::parse_grid(flag, l)?,
        None => default.to_vec(),
    };
    let (kept, dropped) = commands::dedup_grid(&values);
    for v in dropped {
        eprintln!("warning: duplicate {flag} value {v} ignored");
    }
    Ok(kept)
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Simulate { source, out } => {
            let cfg = load(&source)?;
            let outcome = commands::simulate(&cfg, &out)?;
            match &outcome.metrics {
                Ok(m) => emit(&format!(
                    "{:?}: {} landings, avg forward velocity {:.6} m/s (target {:.6}), converged: {}\n",
                    outcome.status, outcome.events, m.avg_forward_velocity, m.target_velocity, m.converged
                )),
                Err(e) => emit(&format!("{:?}: {} landings, no metrics ({e})\n", outcome.status, outcome.events)),
            }
            Ok(outcome.exit_code())
        }
        Command::Stability { source } => {
            let report = commands::stability(&load(&source)?)?;
            emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("json serializes")));
            Ok(EXIT_OK)
        }
        Command::Sweep { source, out, grid_da, grid_dt } => {
            let cfg = load(&source)?;
            let da = grid("--grid-da", grid_da.as_deref(), &DEFAULT_GRID_DA)?;
            let dt = grid("--grid-dt", grid_dt.as_deref(), &DEFAULT_GRID_DT)?;
            let outcome = commands::sweep(&cfg, &da, &dt, &out)?;
            emit(&format!(
                "{} cells, {} unbounded, {} without metrics\n",
                outcome.rows, outcome.unbounded, outcome.failed
            ));
            Ok(EXIT_OK)
        }
        Command::PrintConfig { source } => {
            emit(&load(&source)?.to_toml());
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
