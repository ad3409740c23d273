//! `g2kit`: classify example G2 structures and verify curvature identities,
//! writing versioned JSON reports.

mod catalog;
mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Command;
use crate::config::{Overrides, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "g2kit",
    version,
    about = "Numerical checks for G2 structures on example 7-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Classify the torsion type at each sample point.
    Classify(RunArgs),
    /// Run identity suites; exit status 1 if any residual exceeds its tolerance.
    Verify(RunArgs),
    /// Dump scalar curvatures and the curvature identities per point.
    Curvature(RunArgs),
    /// List the example catalog and its parameters.
    Examples,
}

#[derive(Args)]
struct RunArgs {
    /// Example name (same as --example).
    #[arg(conflicts_with = "example_flag")]
    example: Option<String>,
    #[arg(long = "example", value_name = "NAME", id = "example_flag")]
    example_flag: Option<String>,
    /// Example parameters as key=value, comma separated or repeated.
    #[arg(long, value_name = "K=V", allow_hyphen_values = true)]
    params: Vec<String>,
    /// Number of sample points.
    #[arg(long, value_name = "N")]
    points: Option<usize>,
    /// Seed of the sample sequence.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Relative tolerance for every suite (defaults: 1e-12 pointwise, 1e-6 otherwise).
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Comma separated suites for verify: pointwise, th2, tb, th3, sur.
    #[arg(long, value_name = "NAME")]
    suite: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Dilation function for the th3 suite; `f` is the conformal factor.
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    dilation: Option<String>,
    /// TOML file with the same keys; flags take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

impl From<RunArgs> for Overrides {
    fn from(a: RunArgs) -> Self {
        Overrides {
            config: a.config,
            example: a.example.or(a.example_flag),
            params: a.params,
            points: a.points,
            seed: a.seed,
            tol: a.tol,
            suite: a.suite,
            json: a.json,
            dilation: a.dilation,
        }
    }
}

fn execute(command: Command, args: RunArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::resolve(args.into())?;
    let report = commands::run(command, &cfg)?;
    let text = report.to_json();
    match &cfg.json {
        Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        })?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Output {
                path: "stdout".into(),
                source,
            })?,
    }
    let failed: Vec<String> = report
        .summary
        .identities
        .iter()
        .filter(|s| !s.pass)
        .map(|s| {
            format!(
                "{}/{} (max relative {:.3e} at point {})",
                s.suite, s.name, s.max_relative, s.worst_point
            )
        })
        .collect();
    if !failed.is_empty() {
        eprintln!("identity failures: {}", failed.join("; "));
    }
    Ok(report.summary.pass)
}

fn list_examples() {
    for entry in catalog::CATALOG {
        let params: Vec<String> = entry
            .params
            .iter()
            .map(|(k, d)| match d {
                Some(v) => format!("{k}={v}"),
                None => format!("{k}=?"),
            })
            .collect();
        println!("{:<16} {:<44} {}", entry.name, params.join(" "), entry.summary);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        CliCommand::Classify(a) => (Command::Classify, a),
        CliCommand::Verify(a) => (Command::Verify, a),
        CliCommand::Curvature(a) => (Command::Curvature, a),
        CliCommand::Examples => {
            list_examples();
            return ExitCode::SUCCESS;
        }
    };
    match execute(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("g2kit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
