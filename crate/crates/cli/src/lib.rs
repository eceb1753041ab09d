//! Command-line front end for the `confstress` engine.

pub mod config;
pub mod run;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use confstress::scenarios::scenario_catalog;
use confstress::selfcheck::{run_checks, CheckOptions, CHECKS};

use config::{ConfigError, RunConfig, RunFlags};

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_COVERAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Io { .. }) | CliError::Io(_) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Coverage(_) => EXIT_COVERAGE,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "confstress", version, about = "Stress tensor of a 1+1 massless scalar in conformally flat charts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a scenario on a grid and write CSV or JSON
    Run(Box<RunFlags>),
    /// Run the invariant suites and report residuals
    Check {
        /// Override a tolerance, e.g. `--tol stress.rindler_vacuum=1e-10`
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
        /// Scale the reference constant 1/48π in the oracles (fault injection)
        #[arg(long, hide = true, default_value_t = 1.0)]
        perturb_constant: f64,
    },
    /// List scenarios with their parameters
    ListScenarios {
        #[arg(long)]
        json: bool,
    },
}

/// Parse arguments and execute; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = if code == 0 { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Run(flags) => {
            let cfg = RunConfig::resolve(&flags)?;
            let (bytes, grid) = run::render(&cfg)?;
            match &cfg.output {
                Some(path) => std::fs::write(path, &bytes)?,
                None => out.write_all(&bytes)?,
            }
            let singular = grid.singular_count();
            if singular > 0 {
                writeln!(err, "note: {singular} singular point(s) marked in the output")?;
            }
            Ok(())
        }
        Command::Check { tol, json, perturb_constant } => {
            let opts = CheckOptions { tolerances: parse_tolerances(&tol)?, perturb_constant };
            let results = run_checks(&opts);
            if json {
                serde_json::to_writer_pretty(&mut *out, &results).map_err(std::io::Error::from)?;
                writeln!(out)?;
            } else {
                let width = CHECKS.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
                for r in &results {
                    let verdict = if r.pass { "PASS" } else { "FAIL" };
                    writeln!(out, "{verdict}  {:<width$}  residual {:.3e}  tolerance {:.1e}", r.name, r.residual, r.tolerance)?;
                    if let Some(d) = &r.detail {
                        writeln!(out, "      {d}")?;
                    }
                }
            }
            match results.iter().filter(|r| !r.pass).count() {
                0 => Ok(()),
                n => Err(CliError::CheckFailed(n)),
            }
        }
        Command::ListScenarios { json } => {
            let catalog = scenario_catalog();
            if json {
                serde_json::to_writer_pretty(&mut *out, &catalog).map_err(std::io::Error::from)?;
                writeln!(out)?;
            } else {
                for s in &catalog {
                    writeln!(out, "{}", s.name)?;
                    writeln!(out, "    {}", s.description)?;
                    writeln!(out, "    observation chart: {}; charts: {}", s.observation_chart, s.charts.join(", "))?;
                    for p in &s.params {
                        writeln!(out, "    param {} (default {}, {}): {}", p.name, p.default, p.constraint, p.meaning)?;
                    }
                }
            }
            Ok(())
        }
    }
}

fn parse_tolerances(items: &[String]) -> Result<Vec<(String, f64)>, ConfigError> {
    items
        .iter()
        .map(|item| {
            let bad = |reason: String| ConfigError::Field { field: "tol".into(), reason };
            let (name, value) = item.split_once('=').ok_or_else(|| bad(format!("expected NAME=VALUE, got `{item}`")))?;
            if !CHECKS.iter().any(|(n, _)| *n == name) {
                return Err(bad(format!("unknown check `{name}`")));
            }
            let v: f64 = value.parse().map_err(|_| bad(format!("`{value}` is not a number")))?;
            Ok((name.to_string(), v))
        })
        .collect()
}
