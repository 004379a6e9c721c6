//! Command-line front end: configure a continued fraction or recurrence
//! from a JSON job file and emit closure reports, approximant tables,
//! distributions, targeted subsequences, q-series evaluations, and
//! recurrence asymptotics as JSON/CSV/SVG.

mod commands;
mod emit;
mod job;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cfclosure",
    version,
    about = "Sequential closures and asymptotics of limit-periodic continued fractions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Job description file (JSON).
    #[arg(long, global = true)]
    job: Option<PathBuf>,

    /// Global numeric tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Iteration cap; exceeding it exits with code 3.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_iter: usize,

    /// Directory for secondary artifacts (SVG).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sequential closure report: kind, rank, map, geometry, distribution.
    Closure,
    /// CSV stream of approximants against their predicted positions.
    Approximants,
    /// Histogram of approximants against the limiting measure (CSV + SVG).
    Distribution,
    /// Indices of an approximant subsequence converging to chosen targets.
    Subseq,
    /// Closed-form q-series evaluation of the five-parameter fraction.
    Qeval,
    /// Poincaré-type recurrence asymptotics or (r,s)-matrix fractions.
    Recurrence,
}

/// Failures, carrying the exit code discipline: 2 = invalid job,
/// 3 = iteration cap exceeded (with a partial, uncertified report).
pub enum CliError {
    Invalid(String),
    NonConvergence { partial: String },
}

impl CliError {
    fn invalid(msg: String) -> CliError {
        CliError::Invalid(msg)
    }
}

/// Global execution options shared by every command.
pub struct Ctx {
    pub tol: f64,
    pub max_iter: usize,
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.tol <= 0.0 || !cli.tol.is_finite() {
        eprintln!("error: --tol must be a positive number");
        return ExitCode::from(2);
    }
    let ctx = Ctx {
        tol: cli.tol,
        max_iter: cli.max_iter,
        out: cli.out.clone(),
    };
    let job = match &cli.job {
        Some(path) => match job::load(path) {
            Ok(j) => j,
            Err(CliError::Invalid(msg)) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            Err(CliError::NonConvergence { .. }) => unreachable!("loading cannot iterate"),
        },
        None => {
            eprintln!("error: --job <file.json> is required");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Closure => commands::cmd_closure(&job, &ctx),
        Command::Approximants => commands::cmd_approximants(&job, &ctx),
        Command::Distribution => commands::cmd_distribution(&job, &ctx),
        Command::Subseq => commands::cmd_subseq(&job, &ctx),
        Command::Qeval => commands::cmd_qeval(&job, &ctx),
        Command::Recurrence => commands::cmd_recurrence(&job, &ctx),
    };
    match result {
        Ok(output) => {
            print!("{}", output.stdout);
            if let Some(dir) = &ctx.out {
                if let Err(e) = std::fs::create_dir_all(dir) {
                    eprintln!("error: cannot create {}: {e}", dir.display());
                    return ExitCode::from(2);
                }
                for (name, content) in &output.files {
                    let path = dir.join(name);
                    if let Err(e) = std::fs::write(&path, content) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::NonConvergence { partial }) => {
            print!("{partial}");
            eprintln!("error: iteration cap exceeded; partial results are uncertified");
            ExitCode::from(3)
        }
    }
}
