use hcstab_core::{IoError, LabError, LinkageError, MetricError, UnchainingError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] IoError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Linkage(#[from] LinkageError),
    #[error(transparent)]
    Unchaining(#[from] UnchainingError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error("UnsupportedFormat: {command} cannot write {format}")]
    UnsupportedFormat { command: &'static str, format: &'static str },
    #[error("ConfigError: {0}")]
    Config(String),
    #[error("IoError: {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// 0 success, 1 internal or I/O failure, 2 invalid input, 3 experiment
/// precondition failed, 4 budget exhausted where exactness is required.
pub const EXIT_IO: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

fn unchaining_code(e: &UnchainingError) -> u8 {
    match e {
        UnchainingError::CliqueBudgetExceeded { .. } => EXIT_BUDGET,
        UnchainingError::NoProgress { .. } | UnchainingError::NoThresholdFound(_) => EXIT_PRECONDITION,
        _ => EXIT_INVALID,
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(IoError::Io { .. }) | CliError::Write { .. } => EXIT_IO,
            CliError::Input(_)
            | CliError::Metric(_)
            | CliError::Linkage(_)
            | CliError::InvalidArgument(_)
            | CliError::UnsupportedFormat { .. }
            | CliError::Config(_) => EXIT_INVALID,
            CliError::Unchaining(e) => unchaining_code(e),
            CliError::Lab(e) => match e {
                LabError::NoBehaviorFlip { .. }
                | LabError::LevelTooLarge { .. }
                | LabError::LevelsNotDecreasing
                | LabError::BridgeNotUnique
                | LabError::NotTComponents
                | LabError::PerturbationFailed { .. } => EXIT_PRECONDITION,
                LabError::MetricViolation(_) => EXIT_IO,
                LabError::Unchaining(u) => unchaining_code(u),
                _ => EXIT_INVALID,
            },
        }
    }
}
