use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pmwave::config::ExperimentConfig;
use pmwave::experiment::{self, SweepParam};

#[derive(Parser)]
#[command(
    name = "pmwave",
    about = "Traveling-wave solver for a degenerate porous-medium advection-diffusion \
             equation, with free-boundary detection, nondegeneracy validation and \
             corner classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file and write all artifacts.
    Run {
        /// Path to a `key = value` config file (empty file = desk defaults).
        config: PathBuf,
    },
    /// Re-run one experiment per value of a swept parameter.
    Sweep {
        config: PathBuf,
        /// Parameter to sweep: m, c or eps_floor.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated list of values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Re-run the interface/levelset/corner analyses on a stored snapshot.
    Analyze {
        snapshot: PathBuf,
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => load(&config).and_then(|cfg| {
            experiment::run_experiment(&cfg)?;
            Ok(())
        }),
        Command::Sweep { config, param, values } => load(&config).and_then(|cfg| {
            let report = experiment::sweep(&cfg, param, &values)?;
            for row in &report.rows {
                match &row.result {
                    Ok(summary) => println!("{}={} {summary}", report.param, row.value),
                    Err(msg) => println!("{}={} {msg}", report.param, row.value),
                }
            }
            if let Some((lo, hi)) = report.corner_bracket {
                println!("corner/no-corner transition bracketed in [{lo}, {hi}]");
            }
            Ok(())
        }),
        Command::Analyze { snapshot, config } => load(&config).and_then(|cfg| {
            experiment::analyze_snapshot(&snapshot, &cfg)?;
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, experiment::ExperimentError> {
    Ok(ExperimentConfig::from_file(path)?)
}
