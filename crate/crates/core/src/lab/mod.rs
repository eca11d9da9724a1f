//! Constructions and experiments around stability: paths of spaces, the
//! bridge space, the complete-linkage counterexample family, instability
//! scans and semi-stability probes.

pub mod checks;
pub mod constructions;
pub mod paths;
pub mod probe;
pub mod random;
pub mod scan;

use thiserror::Error;

use crate::gh::GhError;
use crate::linkage::LinkageError;
use crate::metric::MetricError;
use crate::unchaining::UnchainingError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("TrivialPartition: the two blocks must be nonempty and cover the space exactly once")]
    TrivialPartition,
    #[error("MetricViolation: path produced a non-metric ({0})")]
    MetricViolation(String),
    #[error("BridgeNotUnique: the shortest cross distance is realized by more than one pair")]
    BridgeNotUnique,
    #[error("NotTComponents: the blocks are not t-components")]
    NotTComponents,
    #[error("NoBehaviorFlip: both path endpoints have merged = {merged} at level R")]
    NoBehaviorFlip { merged: bool },
    #[error("LevelTooLarge: noise level {level} is not below the smallest distance gap {gap}")]
    LevelTooLarge { level: f64, gap: f64 },
    #[error("LevelsNotDecreasing: noise levels must be strictly decreasing")]
    LevelsNotDecreasing,
    #[error("PerturbationFailed: no metric perturbation found at level {level}")]
    PerturbationFailed { level: f64 },
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Linkage(#[from] LinkageError),
    #[error(transparent)]
    Unchaining(#[from] UnchainingError),
    #[error(transparent)]
    Gh(#[from] GhError),
}
