//! Drives the batch runner from code: parse a configuration, run it, read the report back.
//!
//! Usage: `run_config [config.ini] [out-dir]`, defaulting to `configs/quick.ini`.

use std::path::PathBuf;

use conelab::cli::{parse_config, run, validate_report};

fn main() -> conelab::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = PathBuf::from(args.first().map_or("configs/quick.ini", String::as_str));
    let out = PathBuf::from(args.get(1).map_or("conelab-out", String::as_str));
    let text = std::fs::read_to_string(&path).map_err(|e| conelab::error::Error::Io {
        path: path.clone(),
        source: e,
    })?;
    let config = parse_config(&text, true)?;
    let outcome = run(&config, &out, None)?;
    for s in &outcome.summary.experiments {
        println!(
            "{} {:<20} {}",
            if s.pass { "PASS" } else { "FAIL" },
            s.experiment,
            s.command
        );
    }
    let rows = validate_report(&outcome.csv)?;
    println!("{} rows in {}", rows.len(), outcome.csv.display());
    Ok(())
}
