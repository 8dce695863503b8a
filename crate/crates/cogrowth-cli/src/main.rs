//! Command-line front end: tempered sampling runs with CSV reports, exact
//! cogrowth-series exports, brute-force trivial-word counts, and a
//! self-contained verification suite.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error,
//! 3 verification failure.

mod config;
mod report;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use cogrowth::bruteforce::{
    count_trivial_words_with_cap, BruteForceError, DEFAULT_NODE_CAP,
};
use cogrowth::series::{
    kouksov_series, woess_transform, z2_return_series, CoefficientSeries, KouksovGroup,
};
use cogrowth::tempering::{run_grid, TemperingError};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, settings file, or presentation input (exit code 1).
    #[error("{0}")]
    Config(String),
    /// Failure while sampling or writing results (exit code 2).
    #[error("{0}")]
    Runtime(String),
    /// One or more verification checks failed (exit code 3).
    #[error("{failed} of {total} verification checks failed")]
    Verify { failed: usize, total: usize },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Verify { .. } => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cogrowth",
    version,
    about = "Metropolis sampling of freely reduced trivial words, with exact series cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Sample a ladder of β values with replica exchange; writes
    /// results.csv, blocks.csv and plot.py into the output directory
    Run(config::RunArgs),
    /// Run the built-in verification suite (nonzero exit on failure)
    Verify(VerifyArgs),
    /// Export exact trivial-word counts c(n) from a series oracle
    Series(SeriesArgs),
    /// Count freely reduced trivial words by depth-first enumeration
    Count(CountArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the fast exact checks, skipping the sampling ones
    #[arg(long)]
    quick: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesChoice {
    /// Free abelian group of rank two, via the tree transform
    Z2,
    /// Cyclic group of order two: (1+z²)/(1−z²)
    A2,
    /// Free product Z₂ ∗ Z₃
    K1,
    /// Free product Z₃ ∗ Z₃
    K2,
    /// Free product Z₂ ∗ Z₂ ∗ Z₂
    K3,
}

#[derive(Args)]
struct SeriesArgs {
    /// Which exact series to expand
    #[arg(long, value_enum)]
    which: SeriesChoice,
    /// Highest length to include
    #[arg(long, default_value_t = 40)]
    order: usize,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    /// Bundled presentation name or path to a presentation file
    #[arg(long)]
    presentation: String,
    /// Word-problem oracle: `free`, `abelian:<rank>`, `cyclic:<n,n,...>`
    /// or `affine:<n>`; inferred for bundled names when omitted
    #[arg(long)]
    oracle: Option<String>,
    /// Highest word length to count
    #[arg(long)]
    max_len: usize,
    /// Node budget for the enumeration
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    cap: u128,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Commands::Run(args) => run_command(&args),
        Commands::Verify(args) => verify_command(args.quick),
        Commands::Series(args) => series_command(&args),
        Commands::Count(args) => count_command(&args),
    }
}

fn run_command(args: &config::RunArgs) -> Result<(), CliError> {
    let settings = config::resolve_run(args)?;
    let reports = run_grid(settings.presentation(), &settings.tempering_config()).map_err(
        |err| match err {
            TemperingError::InvalidConfig(msg) => CliError::Config(msg),
            TemperingError::Chain(inner) => CliError::Config(inner.to_string()),
        },
    )?;
    let paths = report::write_reports(&settings, &reports)?;
    for r in &reports {
        println!(
            "beta {:<22} mean {:.4} ± {:.4}  accept c/i {:.3}/{:.3}  guard {:.3}  swap {:.3}  tau {:.1}",
            r.beta,
            r.mean_length,
            r.err,
            r.conj_accept_rate,
            r.insert_accept_rate,
            r.insert_guard_rate,
            r.swap_accept_rate,
            r.tau_int
        );
    }
    println!("wrote {}", paths.describe());
    Ok(())
}

fn verify_command(quick: bool) -> Result<(), CliError> {
    let outcomes = verify::run_checks(quick);
    let total = outcomes.len();
    let mut failed = 0;
    for (i, outcome) in outcomes.iter().enumerate() {
        let line = match outcome.status {
            verify::Status::Pass => format!(
                "criterion {:2} ({}): PASS ({:.2}s; {})",
                i + 1,
                outcome.label,
                outcome.seconds,
                outcome.detail
            ),
            verify::Status::Fail => {
                failed += 1;
                format!(
                    "criterion {:2} ({}): FAIL ({:.2}s; {})",
                    i + 1,
                    outcome.label,
                    outcome.seconds,
                    outcome.detail
                )
            }
            verify::Status::Skipped => format!(
                "criterion {:2} ({}): SKIPPED ({})",
                i + 1,
                outcome.label,
                outcome.detail
            ),
        };
        println!("{line}");
    }
    if failed > 0 {
        Err(CliError::Verify { failed, total })
    } else {
        Ok(())
    }
}

fn series_command(args: &SeriesArgs) -> Result<(), CliError> {
    let series = match args.which {
        SeriesChoice::Z2 => woess_transform(&z2_return_series(args.order), 2, args.order)
            .map_err(|err| CliError::Runtime(err.to_string()))?,
        SeriesChoice::A2 => CoefficientSeries::polynomial(&[1, 0, 1], args.order)
            .mul(&CoefficientSeries::polynomial(&[1, 0, -1], args.order).recip()),
        SeriesChoice::K1 => kouksov_series(KouksovGroup::Z2StarZ3, args.order),
        SeriesChoice::K2 => kouksov_series(KouksovGroup::Z3StarZ3, args.order),
        SeriesChoice::K3 => kouksov_series(KouksovGroup::Z2StarZ2StarZ2, args.order),
    };
    let ints = series
        .integer_coefficients()
        .ok_or_else(|| CliError::Runtime("series has non-integer coefficients".into()))?;
    let mut text = String::from("n,c_n\n");
    for (n, c) in ints.iter().enumerate() {
        text.push_str(&format!("{n},{c}\n"));
    }
    emit(args.out.as_deref(), &text)
}

fn count_command(args: &CountArgs) -> Result<(), CliError> {
    let (label, _, presentation) = config::resolve_presentation(&args.presentation)?;
    let oracle = match &args.oracle {
        Some(spec) => config::parse_oracle(spec)?,
        None => config::infer_oracle(&label).ok_or_else(|| {
            CliError::Config(format!(
                "no word-problem oracle is known for `{label}`; pass --oracle"
            ))
        })?,
    };
    let counts = count_trivial_words_with_cap(&presentation, &oracle, args.max_len, args.cap)
        .map_err(|err| match err {
            BruteForceError::CapExceeded { .. } | BruteForceError::AffineOverflow => {
                CliError::Runtime(err.to_string())
            }
            other => CliError::Config(other.to_string()),
        })?;
    let mut text = String::from("n,c_n\n");
    for (n, c) in counts.iter().enumerate() {
        text.push_str(&format!("{n},{c}\n"));
    }
    emit(args.out.as_deref(), &text)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|err| CliError::Runtime(format!("cannot write {}: {err}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
