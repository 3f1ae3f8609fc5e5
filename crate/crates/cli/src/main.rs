//! `planner`: average rate, minimum-energy deployment, sleep-mode savings
//! and Monte-Carlo validation for multi-tier cellular networks.
//!
//! Exit codes: 0 ok, 2 parse or usage error, 3 numerical failure,
//! 4 infeasible requirement, 5 validation failure.

mod commands;
mod error;
mod output;
mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use densenet::scenario::{NetworkScenario, TrafficProfile};

use commands::{Inputs, Outcome};
use error::CliError;
use output::Format;
use sweep::Sweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Verb {
    /// Average rate, optionally swept.
    Rate,
    /// Minimum-power deployment meeting --r0.
    Optimize,
    /// Hourly sleep-mode savings over a traffic profile.
    Savings,
    /// Monte-Carlo estimate of the average rate.
    Simulate,
    /// Analytic model against the Monte-Carlo oracle.
    Validate,
}

#[derive(Debug, Parser)]
#[command(name = "planner", version, about = "Energy-aware multi-tier network planner")]
struct Cli {
    #[arg(value_enum)]
    verb: Verb,
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Rate requirement in b/s/Hz.
    #[arg(long)]
    r0: Option<f64>,
    /// Traffic profile CSV: hour_start,hour_end,relative_load_percent.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Monte-Carlo trials (default 10000).
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed of the Monte-Carlo streams (default 42).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// PARAM:start:stop:points:lin|log with PARAM one of ue_density, load,
    /// density.<tier>, snr_db, noise_w, sinr_gap_db, r0.
    #[arg(long)]
    sweep: Option<String>,
    /// Add the closed-form bracket (single Rayleigh tier, α = 4).
    #[arg(long)]
    closed_bounds: bool,
    /// Make every deployed BS transmit regardless of load.
    #[arg(long)]
    full_load_override: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_inputs(cli: &Cli) -> Result<Inputs, CliError> {
    let scenario = NetworkScenario::from_json(&read(&cli.scenario)?)?;
    let profile = cli
        .profile
        .as_deref()
        .map(|p| read(p).and_then(|t| Ok(TrafficProfile::from_csv(&t)?)))
        .transpose()?;
    let sweep = cli.sweep.as_deref().map(Sweep::parse).transpose()?;
    if let Some(r0) = cli.r0 {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(CliError::Usage(format!("--r0 must be positive, got {r0}")));
        }
    }
    Ok(Inputs {
        scenario,
        r0: cli.r0,
        profile,
        trials: cli.trials,
        seed: cli.seed,
        sweep,
        closed_bounds: cli.closed_bounds,
        full_load_override: cli.full_load_override,
    })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let inputs = load_inputs(cli)?;
    match cli.verb {
        Verb::Rate => commands::cmd_rate(&inputs),
        Verb::Optimize => commands::cmd_optimize(&inputs),
        Verb::Savings => commands::cmd_savings(&inputs),
        Verb::Simulate => commands::cmd_simulate(&inputs),
        Verb::Validate => commands::cmd_validate(&inputs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // Help and version exit 0, argument errors exit 2.
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(outcome) => {
            let text = output::render(&outcome.report, cli.format);
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(outcome.status.code())
        }
        Err(e) => {
            eprintln!("planner: {e}");
            ExitCode::from(e.status().code())
        }
    }
}
