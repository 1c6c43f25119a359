use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use raftguard::experiment::{load_config, run, ExperimentError, OutputFormat, Overrides, Scenario};

/// Coverage and authentication sweeps for a jammed RAFT network.
#[derive(Debug, Parser)]
#[command(name = "raftguard", version)]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per sweep point; overrides the file.
    #[arg(long)]
    trials: Option<u64>,
    /// Output path; overrides the file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; overrides the file.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Scenario name; overrides the file.
    #[arg(long, value_parser = parse_scenario)]
    scenario: Option<Scenario>,
    /// Check the config and exit.
    #[arg(long)]
    validate_only: bool,
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    OutputFormat::parse(s).ok_or_else(|| format!("unknown format {s:?} (expected csv or json)"))
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    Scenario::parse(s).ok_or_else(|| format!("unknown scenario {s:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        trials: cli.trials,
        out: cli.out,
        format: cli.format,
        scenario: cli.scenario,
    };
    let result = load_config(&cli.config, &overrides).and_then(|cfg| {
        if cli.validate_only {
            Ok(format!("{}: ok ({})", cli.config.display(), cfg.scenario))
        } else {
            run(&cfg)
        }
    });
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                ExperimentError::Config(_) => eprintln!("config error:\n{e}"),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
