//! Linkage functions and the standard linkage-based recursion.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dendrogram::Dendrogram;
use crate::metric::{FiniteMetricSpace, Partition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkageError {
    #[error("EmptyBlock: linkage needs two nonempty blocks")]
    EmptyBlock,
    #[error("OverlappingBlocks: point {0:?} is in both blocks")]
    OverlappingBlocks(String),
    #[error("UnknownLinkage: {0:?} (expected sl, cl, al or exotic)")]
    UnknownLinkage(String),
    #[error("InvalidLinkageValue: linkage {name} returned {value}, expected a positive finite number")]
    InvalidLinkageValue { name: String, value: f64 },
}

/// A dissimilarity between two disjoint blocks of a space.
///
/// Blocks are slices of point indices. Representation independence and
/// monotonicity are not enforced here; [`crate::axioms::axiom_harness`]
/// checks them empirically.
pub trait Linkage: Send + Sync {
    fn name(&self) -> &str;

    fn evaluate(&self, a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> f64;

    /// [`Linkage::evaluate`] with the block preconditions checked.
    fn link(&self, a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> Result<f64, LinkageError> {
        check_blocks(a, b, space)?;
        Ok(self.evaluate(a, b, space))
    }
}

pub(crate) fn check_blocks(a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> Result<(), LinkageError> {
    if a.is_empty() || b.is_empty() {
        return Err(LinkageError::EmptyBlock);
    }
    if let Some(&x) = a.iter().find(|x| b.contains(x)) {
        return Err(LinkageError::OverlappingBlocks(space.label(x).to_string()));
    }
    Ok(())
}

/// Minimum cross distance.
pub fn single(a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> f64 {
    let mut best = f64::INFINITY;
    for &x in a {
        for &y in b {
            best = best.min(space.d(x, y));
        }
    }
    best
}

/// Maximum cross distance.
pub fn complete(a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> f64 {
    let mut worst = 0.0f64;
    for &x in a {
        for &y in b {
            worst = worst.max(space.d(x, y));
        }
    }
    worst
}

/// Mean cross distance, summed in index order.
pub fn average(a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> f64 {
    let mut sum = 0.0;
    for &x in a {
        for &y in b {
            sum += space.d(x, y);
        }
    }
    sum / (a.len() * b.len()) as f64
}

/// Single linkage divided by the total block size. Not increasing: the
/// recursion can produce `R_2 < R_1`.
pub fn exotic(a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> f64 {
    single(a, b, space) / (a.len() + b.len()) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinLinkage {
    Sl,
    Cl,
    Al,
    Exotic,
}

impl BuiltinLinkage {
    pub const ALL: [BuiltinLinkage; 4] = [Self::Sl, Self::Cl, Self::Al, Self::Exotic];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sl => "sl",
            Self::Cl => "cl",
            Self::Al => "al",
            Self::Exotic => "exotic",
        }
    }
}

impl fmt::Display for BuiltinLinkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuiltinLinkage {
    type Err = LinkageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sl" => Ok(Self::Sl),
            "cl" => Ok(Self::Cl),
            "al" => Ok(Self::Al),
            "exotic" => Ok(Self::Exotic),
            other => Err(LinkageError::UnknownLinkage(other.to_string())),
        }
    }
}

impl Linkage for BuiltinLinkage {
    fn name(&self) -> &str {
        self.as_str()
    }

    fn evaluate(&self, a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> f64 {
        match self {
            Self::Sl => single(a, b, space),
            Self::Cl => complete(a, b, space),
            Self::Al => average(a, b, space),
            Self::Exotic => exotic(a, b, space),
        }
    }
}

/// Adapter for ad-hoc linkages given as closures.
pub struct FnLinkage<F> {
    name: String,
    f: F,
}

impl<F> FnLinkage<F>
where
    F: Fn(&[usize], &[usize], &FiniteMetricSpace) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F> Linkage for FnLinkage<F>
where
    F: Fn(&[usize], &[usize], &FiniteMetricSpace) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn evaluate(&self, a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> f64 {
        (self.f)(a, b, space)
    }
}

/// How a round's threshold was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdRule {
    /// Minimum linkage over the current blocks.
    Fresh,
    /// Smallest linkage strictly above the previous threshold after a stall.
    NextLinkage,
    /// Smallest threshold at which some pair satisfies the unchaining condition.
    Condition,
}

/// One pass of the recursion: the threshold `R_i`, the partition it acted on
/// and the edges of the merge graph (pairs of block indices).
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub level: f64,
    pub rule: ThresholdRule,
    pub partition: Partition,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub labels: Vec<String>,
    pub rounds: Vec<Round>,
    pub result: Partition,
}

impl RunTrace {
    pub fn levels(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.level).collect()
    }

    /// Partitions `Θ_1, Θ_2, ...` including the final one.
    pub fn partitions(&self) -> impl Iterator<Item = &Partition> {
        self.rounds.iter().map(|r| &r.partition).chain(std::iter::once(&self.result))
    }

    /// The dendrogram `θ(r) = Θ_{i(r)+1}` with `i(r) = max { i : R_i <= r }`.
    pub fn dendrogram(&self) -> Dendrogram {
        let thetas: Vec<&Partition> = self.partitions().collect();
        let levels = self.levels();
        let mut candidates = levels.clone();
        candidates.push(0.0);
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        let partitions = candidates
            .iter()
            .map(|&v| {
                let i = levels
                    .iter()
                    .enumerate()
                    .filter(|(_, &r)| r <= v)
                    .map(|(k, _)| k + 1)
                    .max()
                    .unwrap_or(0);
                thetas[i].clone()
            })
            .collect();
        Dendrogram::from_levels_unchecked(self.labels.clone(), candidates, partitions)
    }

    pub fn to_json(&self) -> TraceJson {
        TraceJson {
            rounds: self
                .rounds
                .iter()
                .map(|r| RoundJson {
                    level: r.level,
                    rule: r.rule,
                    blocks: r.partition.to_labels(&self.labels),
                    edges: r.edges.clone(),
                })
                .collect(),
            result: self.result.to_labels(&self.labels),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundJson {
    pub level: f64,
    pub rule: ThresholdRule,
    pub blocks: Vec<Vec<String>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub rounds: Vec<RoundJson>,
    pub result: Vec<Vec<String>>,
}

/// Linkage value for every unordered pair of blocks, in index order.
pub(crate) fn pair_values(
    partition: &Partition,
    linkage: &dyn Linkage,
    space: &FiniteMetricSpace,
) -> Result<Vec<(usize, usize, f64)>, LinkageError> {
    let blocks = partition.blocks();
    let mut out = Vec::with_capacity(blocks.len() * (blocks.len() - 1) / 2);
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let v = linkage.evaluate(&blocks[i], &blocks[j], space);
            if !(v > 0.0) || !v.is_finite() {
                return Err(LinkageError::InvalidLinkageValue {
                    name: linkage.name().to_string(),
                    value: v,
                });
            }
            out.push((i, j, v));
        }
    }
    Ok(out)
}

/// Standard linkage-based clustering: at each round `R_i` is the minimum
/// linkage between current blocks, and blocks joined by a chain of pairs with
/// linkage `<= R_i` merge together.
pub fn run_standard(
    space: &FiniteMetricSpace,
    linkage: &dyn Linkage,
) -> Result<(Dendrogram, RunTrace), LinkageError> {
    let mut partition = Partition::singletons(space.len());
    let mut rounds = Vec::new();
    while partition.len() > 1 {
        let values = pair_values(&partition, linkage, space)?;
        let level = values.iter().map(|v| v.2).fold(f64::INFINITY, f64::min);
        let edges: Vec<(usize, usize)> =
            values.iter().filter(|v| v.2 <= level).map(|v| (v.0, v.1)).collect();
        let next = partition.merge_components(&edges);
        rounds.push(Round {
            level,
            rule: ThresholdRule::Fresh,
            partition,
            edges,
        });
        partition = next;
    }
    let trace = RunTrace {
        labels: space.labels().to_vec(),
        rounds,
        result: partition,
    };
    Ok((trace.dendrogram(), trace))
}

/// True iff `R_1 < R_2 < ...` strictly.
pub fn check_increasing(trace: &RunTrace) -> bool {
    trace.rounds.windows(2).all(|w| w[0].level < w[1].level)
}
