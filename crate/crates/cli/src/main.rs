use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use filament_core::scenarios::{config_reference, run_scenario, ScenarioConfig};
use filament_core::FilamentError;

/// Run a filament scenario: convergence, trajectory or divergence.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Scenario name.
    scenario: Option<String>,
    /// TOML config; keys left out take the scenario defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tube radii, overriding `eps_list`.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    eps: Option<Vec<f64>>,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for drawn initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the config reference and exit.
    #[arg(long)]
    reference: bool,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_HALT: u8 = 3;

fn load(args: &Args) -> Result<ScenarioConfig, FilamentError> {
    let scenario = args.scenario.as_deref();
    let mut config = match (&args.config, scenario) {
        (Some(path), s) => ScenarioConfig::load(path, s)?,
        (None, Some(s)) => ScenarioConfig::defaults(s)?,
        (None, None) => return Err(FilamentError::InvalidConfig("give a scenario name or --config".into())),
    };
    if let Some(eps) = &args.eps {
        config.eps_list = eps.clone();
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.reference {
        print!("{}", config_reference());
        return ExitCode::SUCCESS;
    }
    let config = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("simulate: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match run_scenario(&config) {
        Ok(report) => {
            print!("{}", report.render());
            if report.halted() {
                eprintln!("simulate: run halted on the separation floor");
                ExitCode::from(EXIT_HALT)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ FilamentError::InvalidConfig(_)) => {
            eprintln!("simulate: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(e) => {
            eprintln!("simulate: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
