//! The `qdt` command line.
//!
//! Exit codes: 0 on success, 1 when a scenario fails validation, 2 on parse or
//! usage errors. Errors are written to stderr as a single JSON line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdt_core::measure::NormalizationMode;
use qdt_core::oracle::DEFAULT_MAX_DIMENSION;

use crate::builtin::{builtin_with, BuiltinParams};
use crate::error::{Result, ScenarioError};
use crate::format::{parse_scenario, Scenario};
use crate::random::{random_scenario, MatrixKind};
use crate::report::{analyze_with, render_validation, Format};

/// Prefix that resolves a scenario argument to a built-in.
pub const DEMO_PREFIX: &str = "demo:";

#[derive(Debug, Parser)]
#[command(name = "qdt", version, about = "Quantum decision calculus: evaluate, rank and verify prospect scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Normalization {
    Strict,
    Given,
    Renorm,
}

impl From<Normalization> for NormalizationMode {
    fn from(n: Normalization) -> Self {
        match n {
            Normalization::Strict => NormalizationMode::Strict,
            Normalization::Given => NormalizationMode::Given,
            Normalization::Renorm => NormalizationMode::Renorm,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Strict,
    Column,
    Free,
}

#[derive(Debug, Args)]
struct Flags {
    /// Validation tolerance (overrides the scenario option).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Normalization policy (overrides the scenario option).
    #[arg(long, global = true, value_enum)]
    normalization: Option<Normalization>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Cross-check every number against the dense-operator oracle.
    #[arg(long, global = true)]
    oracle: bool,
    /// Largest dimension the oracle accepts.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DIMENSION)]
    oracle_max_dim: usize,
    /// Seed for `random`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Phase of the `disjunction` built-in.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    phase: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check normalization conditions and residuals.
    Validate { scenario: String },
    /// Print the full decision report.
    Evaluate { scenario: String },
    /// Print prospects best first.
    Rank { scenario: String },
    /// Print a built-in scenario document (h2, disjunction, register).
    Demo { name: String },
    /// Print a seeded random scenario document.
    Random {
        /// Mode counts per factor, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,2")]
        modes: Vec<usize>,
        /// Number of prospects; defaults to the mind-space dimension.
        #[arg(long)]
        prospects: Option<usize>,
        #[arg(long, value_enum, default_value_t = Kind::Strict)]
        kind: Kind,
    },
}

fn builtin_params(flags: &Flags) -> BuiltinParams {
    BuiltinParams {
        phase: flags.phase,
        ..BuiltinParams::default()
    }
}

/// Reads a scenario from a path or a `demo:<name>` reference.
pub fn load_scenario(reference: &str, params: &BuiltinParams) -> Result<Scenario> {
    if let Some(name) = reference.strip_prefix(DEMO_PREFIX) {
        return builtin_with(name, params);
    }
    let path = PathBuf::from(reference);
    let bytes = std::fs::read(&path).map_err(|source| ScenarioError::Io {
        path: reference.to_string(),
        source,
    })?;
    parse_scenario(&bytes)
}

fn apply_flags(scenario: &mut Scenario, flags: &Flags) -> Result<()> {
    if let Some(mode) = flags.normalization {
        scenario.options.normalization = mode.into();
    }
    if let Some(t) = flags.tolerance {
        scenario.options.tolerance = t;
    }
    if flags.oracle {
        scenario.options.oracle = true;
    }
    scenario.policy()?;
    Ok(())
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let flags = &cli.flags;
    let write = |out: &mut dyn Write, text: &str| {
        out.write_all(text.as_bytes())
            .map_err(|source| ScenarioError::Io {
                path: "<stdout>".into(),
                source,
            })
    };
    match &cli.command {
        Command::Demo { name } => {
            let scenario = builtin_with(name, &builtin_params(flags))?;
            write(out, &scenario.to_json())?;
            Ok(0)
        }
        Command::Random {
            modes,
            prospects,
            kind,
        } => {
            let dimension: usize = modes.iter().product();
            let kind = match kind {
                Kind::Strict => MatrixKind::UnitaryStrict,
                Kind::Column => MatrixKind::ColumnUnit,
                Kind::Free => MatrixKind::Free,
            };
            let mut scenario =
                random_scenario(flags.seed.unwrap_or(0), modes, prospects.unwrap_or(dimension), kind)?;
            apply_flags(&mut scenario, flags)?;
            write(out, &scenario.to_json())?;
            Ok(0)
        }
        Command::Validate { scenario } | Command::Evaluate { scenario } | Command::Rank { scenario } => {
            let mut s = load_scenario(scenario, &builtin_params(flags))?;
            apply_flags(&mut s, flags)?;
            let analysis = analyze_with(&s, flags.oracle_max_dim)?;
            let text = match cli.command {
                Command::Validate { .. } => render_validation(&analysis, flags.format),
                Command::Rank { .. } => analysis.report.render(flags.format, true),
                _ => analysis.report.render(flags.format, false),
            };
            write(out, &text)?;
            match analysis.failure {
                Some(e) => Err(e),
                None => Ok(0),
            }
        }
    }
}

fn error_line(e: &ScenarioError) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let usage = ScenarioError::Usage(e.kind().to_string());
                let _ = writeln!(err, "{}", error_line(&usage));
                let _ = write!(err, "{}", e.render());
            }
            return code;
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", error_line(&e));
            e.exit_code()
        }
    }
}
