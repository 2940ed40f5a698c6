//! Command-line front end: config parsing, subcommand dispatch, NDJSON/CSV
//! emission and run manifests.
//!
//! Exit codes: 0 when every check passes, 1 when a monitor, inequality or
//! fit check fails, 2 for configuration and usage errors. Every nonzero exit
//! prints one JSON error object on standard error.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use dampwave_core::experiments::ExperimentError;
use dampwave_core::inequalities::InequalityError;
use dampwave_core::solver::SolverError;
use dampwave_core::weights::WeightError;
use serde_json::{json, Value};
use thiserror::Error;

pub use commands::{Cli, Command};
pub use config::{parse_config, parse_config_str, ConfigError, ResolvedConfig};
pub use manifest::RunManifest;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "DAMPWAVE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("unknown command {0:?}")]
    UnknownCommand(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}, line {line}: {message}")]
    Input { path: String, line: usize, message: String },
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Inequality(#[from] InequalityError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    CheckFailed(String),
}

fn weight_code(e: &WeightError) -> i32 {
    match e {
        WeightError::InvalidParameter(_) | WeightError::DimensionMismatch { .. } => 2,
        _ => 1,
    }
}

fn solver_code(e: &SolverError) -> i32 {
    match e {
        SolverError::ConfigInvalid(_) => 2,
        _ => 1,
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Self::Io {
            path: path.into().display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Usage(_) | Self::UnknownCommand(_) | Self::Io { .. } | Self::Input { .. } => 2,
            Self::Experiment(e) => match e {
                ExperimentError::InvalidParameter(_) => 2,
                ExperimentError::Solver(s) => solver_code(s),
                ExperimentError::Weight(w) => weight_code(w),
                _ => 1,
            },
            Self::Inequality(e) => match e {
                InequalityError::InvalidParameter(_) => 2,
                InequalityError::Weight(w) => weight_code(w),
                InequalityError::InequalityViolation { .. } => 1,
            },
            Self::Weight(e) => weight_code(e),
            Self::Solver(e) => solver_code(e),
            Self::CheckFailed(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "ConfigInvalid",
            Self::Usage(_) => "Usage",
            Self::UnknownCommand(_) => "UnknownCommand",
            Self::Io { .. } => "Io",
            Self::Input { .. } => "InputInvalid",
            Self::Experiment(ExperimentError::SweepInconclusive { .. }) => "SweepInconclusive",
            Self::Experiment(ExperimentError::InsufficientData(_)) => "InsufficientData",
            Self::Inequality(InequalityError::InequalityViolation { .. }) => "InequalityViolation",
            Self::CheckFailed(_) => "CheckFailed",
            other if other.exit_code() == 2 => "InvalidParameter",
            _ => "RunFailed",
        }
    }

    /// Machine-readable form printed on standard error.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        match self {
            Self::Config(c) => {
                v["line"] = json!(c.line);
                v["key"] = json!(c.key);
            }
            Self::Input { line, .. } => v["line"] = json!(line),
            Self::Inequality(InequalityError::InequalityViolation { lemma, seed, ratio }) => {
                v["lemma"] = json!(lemma);
                v["seed"] = json!(seed);
                v["ratio"] = json!(ratio);
            }
            _ => {}
        }
        v
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(ConfigError {
            line: None,
            key: Some(THREADS_ENV.into()),
            message: format!("expected a positive integer, got {raw:?}"),
        })
    })?;
    // A pool that already exists (repeated in-process dispatch) is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn report(err: &CliError) {
    eprintln!("{}", err.to_json());
}

/// Parses `argv` (program name first), runs the subcommand, writes its
/// manifest and returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let raw: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = match e.kind() {
                ErrorKind::InvalidSubcommand => CliError::UnknownCommand(raw.get(1).cloned().unwrap_or_default()),
                _ => CliError::Usage(e.render().to_string().trim().to_string()),
            };
            report(&err);
            return err.exit_code();
        }
    };
    let manifest_path = manifest::manifest_path(cli.manifest.as_deref(), cli.output.as_deref());
    let result = configure_threads().and_then(|()| commands::run(&cli));
    let (manifest, code) = match result {
        Ok(outcome) => {
            let mut m = RunManifest::new(cli.command.name(), &outcome.inputs, outcome.seed);
            m.outputs = outcome.outputs;
            m.summary = outcome.summary;
            if let Some(reason) = outcome.failure {
                let err = CliError::CheckFailed(reason);
                report(&err);
                m.exit_code = err.exit_code();
            }
            let code = m.exit_code;
            (m, code)
        }
        Err(err) => {
            report(&err);
            let mut m = RunManifest::new(cli.command.name(), &json!({ "argv": raw }), 0);
            m.exit_code = err.exit_code();
            m.summary = err.to_json();
            (m, err.exit_code())
        }
    };
    if let Err(e) = manifest.write(&manifest_path) {
        let err = CliError::io(&manifest_path, e);
        report(&err);
        return code.max(err.exit_code());
    }
    code
}
