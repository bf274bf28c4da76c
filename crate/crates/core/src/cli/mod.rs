//! Batch front-end: configuration, dispatch and reports.

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

pub use config::{parse_config, Command, ExperimentConfig, RunConfig};
pub use report::{validate_report, ReportRow, Summary, SummaryDocument, COLUMNS, SCHEMA_VERSION};
pub use run::{run, run_experiment, RunOutcome, REPORT_FILE, SUMMARY_FILE};

use crate::error::{Error, Result};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CONELAB_WORKERS";

#[derive(Debug, Clone, Parser)]
#[command(
    name = "conelab",
    version,
    about = "Batch experiments for the cone extension operator"
)]
pub struct Args {
    /// Experiment configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Directory receiving report.csv and summary.json.
    #[arg(long, value_name = "DIR", default_value = "conelab-out")]
    pub out: PathBuf,
    /// Worker threads; defaults to the config, then to one per core.
    #[arg(long, value_name = "N", env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Overrides the seed given in the config.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Treat unknown configuration keys as errors.
    #[arg(long)]
    pub strict: bool,
}

/// Reads, runs and reports; the outcome's `pass` drives the exit status.
pub fn execute(args: &Args) -> Result<RunOutcome> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::Io {
        path: args.config.clone(),
        source: e,
    })?;
    let mut config = parse_config(&text, args.strict)?;
    for w in &config.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.workers == Some(0) {
        return Err(Error::InvalidArgument("--workers must be positive".into()));
    }
    run(&config, &args.out, args.workers)
}

/// Exit status: 0 when every check passes, 1 when one fails, 2 on errors.
pub fn main_with(args: Args) -> ExitCode {
    match execute(&args) {
        Ok(outcome) => {
            for s in &outcome.summary.experiments {
                let verdict = if s.pass { "PASS" } else { "FAIL" };
                let mut line = format!("{verdict} {} ({})", s.experiment, s.command);
                if let Some(slope) = s.slope {
                    line += &format!(" slope {slope:.4}");
                    if let (Some(e), Some(t)) = (s.expected_slope, s.tolerance) {
                        line += &format!(" expected {e:.4} tol {t}");
                    }
                }
                if let Some(err) = &s.error {
                    line += &format!(": {err}");
                }
                println!("{line}");
            }
            println!(
                "wrote {} and {}",
                outcome.csv.display(),
                outcome.json.display()
            );
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
