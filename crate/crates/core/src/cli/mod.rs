//! Command-line front end: argument parsing, dispatch, output and exit codes.

pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::{ConfigError, RunConfig};
pub use table::{Cell, Format, Table};

use crate::checks::{report_json, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Compute(#[from] crate::Error),
    #[error("cannot write {path}: {reason}")]
    Output { path: String, reason: String },
    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use crate::Error as E;
        match self {
            CliError::Config(_) | CliError::Output { .. } => EXIT_CONFIG,
            CliError::Verification { .. } => EXIT_VERIFY,
            CliError::Compute(e) => match e {
                E::GridTooCoarse { .. }
                | E::NoSignChange { .. }
                | E::DivergentNorm { .. }
                | E::NotNormalizable
                | E::TurningPointOnGrid(_) => EXIT_ORACLE,
                E::InvalidParameter(_)
                | E::NegativeDiscriminant(_)
                | E::WrongAlpha(_)
                | E::DegenerateCoefficient(_)
                | E::ComplexRoots(_) => EXIT_CONFIG,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qbertrand", version, about = "Solvable central potentials: tables, spectra and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format (default csv; json for verify)
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized draws
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// File of `key = value` lines; command-line entries take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate V(r) for family=first|pct|second
    Potential(Entries),
    /// Energy levels for case=coulomb|oscillator|numeric
    Spectrum(Entries),
    /// Run the verification checks and write a report
    Verify {
        /// Run only these check groups (comma-separated)
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        entries: Entries,
    },
    /// Levels of the exponential-map potential at fixed l
    Pct(Entries),
    /// Coefficients of a second-class member
    SecondClass(Entries),
    /// Constant-independence classification over alpha
    Classify(Entries),
}

#[derive(Debug, clap::Args)]
struct Entries {
    /// key=value parameters
    #[arg(value_name = "KEY=VALUE")]
    params: Vec<String>,
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let (name, entries) = match &cli.command {
        Command::Potential(e) => ("potential", e),
        Command::Spectrum(e) => ("spectrum", e),
        Command::Verify { entries, .. } => ("verify", entries),
        Command::Pct(e) => ("pct", e),
        Command::SecondClass(e) => ("second-class", e),
        Command::Classify(e) => ("classify", e),
    };
    let mut cfg = RunConfig::new(name);
    if let Some(path) = &cli.config {
        cfg.merge_file(path)?;
    }
    cfg.merge_args(&entries.params)?;
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let format = |default| match cli.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => default,
    };

    let output = match &cli.command {
        Command::Verify { only, .. } => {
            cfg.restrict(&[])?;
            let results = commands::verify(seed, only.as_deref())?;
            let text = match format(Format::Json) {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report_json(&results)).expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Csv => commands::verify_table(&results).to_csv(),
            };
            emit(cli.out.as_ref(), &text)?;
            let failed = results.iter().filter(|r| !r.pass).count();
            for r in results.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {}: measured {:e}, tolerance {:e}", r.name, r.measured, r.tolerance);
            }
            if failed > 0 {
                return Err(CliError::Verification {
                    failed,
                    total: results.len(),
                });
            }
            return Ok(());
        }
        Command::Potential(_) => commands::potential(&cfg)?,
        Command::Spectrum(_) => commands::spectrum(&cfg)?,
        Command::Pct(_) => commands::pct(&cfg)?,
        Command::SecondClass(_) => commands::second_class(&cfg)?,
        Command::Classify(_) => commands::classify(&cfg, seed)?,
    };
    emit(cli.out.as_ref(), &output.render(format(Format::Csv)))
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    let result = match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| CliError::Output {
        path: path.map_or("stdout".to_string(), |p| p.display().to_string()),
        reason: e.to_string(),
    })
}
