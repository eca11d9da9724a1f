//! Linkage-based and almost-standard hierarchical clustering on finite
//! metric spaces, exact Gromov-Hausdorff distances for small spaces, and
//! tools for probing the stability of clustering methods.

pub mod axioms;
pub mod clique;
pub mod dendrogram;
pub mod gh;
pub mod io;
pub mod lab;
pub mod linkage;
pub mod method;
pub mod metric;
pub mod unchaining;

pub use axioms::{axiom_harness, AxiomCheck, AxiomReport};
pub use dendrogram::{Dendrogram, DendrogramError, DendrogramJson, MergeRow, MergeTable};
pub use gh::{
    distortion, gh_bounds, gh_exact, gh_lower_bound, gh_upper_from, Correspondence, GhError, GhResult,
    DEFAULT_GH_BUDGET,
};
pub use io::{read_matrix, IoError, MatrixFile};
pub use lab::checks::{
    admissibility_harness, bridged_by_single_edge, gamma_regularity_check, path_continuity_check,
};
pub use lab::constructions::{cl_counterexample, cl_counterexample_top, prop_bridge_space, ClCounterexample};
pub use lab::paths::{PathKind, PathSpec};
pub use lab::probe::{semistability_probe, PerturbationReport};
pub use lab::random::{random_metric, random_ultrametric};
pub use lab::scan::{instability_scan, WitnessPair};
pub use lab::LabError;
pub use linkage::{
    check_increasing, run_standard, BuiltinLinkage, FnLinkage, Linkage, LinkageError, Round, RunTrace,
    ThresholdRule, TraceJson,
};
pub use method::MethodSpec;
pub use metric::{interval_space, DistanceSet, FiniteMetricSpace, MetricError, Partition, Ultrametric, Validation};
pub use unchaining::{
    cross_simplex_max_dim, rips_block_dim, run_almost_standard, sl_alpha, unchaining_threshold, Always, Condition,
    PAlpha, Unchaining, UnchainingError,
};
