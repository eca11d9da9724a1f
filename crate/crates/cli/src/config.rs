//! Fully resolved run configurations. Every report carries the one that
//! produced it, and `hcstab run --config` replays it.

use clap::ValueEnum;
use hcstab_core::MethodSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Newick,
    MergeTable,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Newick => "newick",
            Format::MergeTable => "merge-table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PathChoice {
    Gamma,
    Bridge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HarnessKind {
    Axioms,
    Admissibility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum ScanSource {
    PropBridge {
        alpha: usize,
        gap: f64,
    },
    File {
        input: String,
        block1: Vec<String>,
        path: PathChoice,
        /// Gamma target; defaults to the method's linkage between the blocks.
        r: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum ProbeSource {
    File { input: String },
    Random { n: usize, depth: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum RunConfig {
    Validate {
        input: String,
        tol: f64,
        pseudometric: bool,
        format: Format,
    },
    Cluster {
        input: String,
        method: MethodSpec,
        tol: f64,
        pseudometric: bool,
        format: Format,
    },
    Gh {
        input: String,
        input2: String,
        budget: u64,
        require_exact: bool,
        bounds_only: bool,
        tol: f64,
        format: Format,
    },
    PathScan {
        source: ScanSource,
        method: MethodSpec,
        tol: f64,
        budget: u64,
        format: Format,
    },
    Counterexample {
        k_min: usize,
        k_max: usize,
        budget: u64,
        format: Format,
    },
    Probe {
        source: ProbeSource,
        method: MethodSpec,
        levels: Vec<f64>,
        trials: usize,
        seed: u64,
        budget: u64,
        format: Format,
    },
    Harness {
        kind: HarnessKind,
        method: MethodSpec,
        trials: usize,
        seed: u64,
        format: Format,
    },
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Validate { .. } => "validate",
            RunConfig::Cluster { .. } => "cluster",
            RunConfig::Gh { .. } => "gh",
            RunConfig::PathScan { .. } => "path-scan",
            RunConfig::Counterexample { .. } => "counterexample",
            RunConfig::Probe { .. } => "probe",
            RunConfig::Harness { .. } => "harness",
        }
    }

    pub fn format(&self) -> Format {
        match self {
            RunConfig::Validate { format, .. }
            | RunConfig::Cluster { format, .. }
            | RunConfig::Gh { format, .. }
            | RunConfig::PathScan { format, .. }
            | RunConfig::Counterexample { format, .. }
            | RunConfig::Probe { format, .. }
            | RunConfig::Harness { format, .. } => *format,
        }
    }

    pub fn set_format(&mut self, f: Format) {
        match self {
            RunConfig::Validate { format, .. }
            | RunConfig::Cluster { format, .. }
            | RunConfig::Gh { format, .. }
            | RunConfig::PathScan { format, .. }
            | RunConfig::Counterexample { format, .. }
            | RunConfig::Probe { format, .. }
            | RunConfig::Harness { format, .. } => *format = f,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configs serialize")
    }

    /// `key=value` pairs for a Newick comment, which cannot hold brackets.
    pub fn to_newick_comment(&self) -> String {
        let value = serde_json::to_value(self).expect("configs serialize");
        let mut parts = vec!["config".to_string()];
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                let v = match v {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                parts.push(format!("{k}={}", v.replace(['[', ']'], "")));
            }
        }
        format!("[{}]", parts.join(" "))
    }
}
