//! Almost-standard methods `T(l; P)`: linkage recursion gated by an
//! unchaining condition, with `P_alpha` and `SL(alpha)` built in.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::clique::{max_clique_in, ThresholdGraph, DEFAULT_NODE_BUDGET};
use crate::dendrogram::Dendrogram;
use crate::linkage::{check_blocks, pair_values, single, Linkage, LinkageError, Round, RunTrace, ThresholdRule};
use crate::metric::{FiniteMetricSpace, Partition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnchainingError {
    #[error("EmptyBlock: blocks must be nonempty")]
    EmptyBlock,
    #[error("OverlappingBlocks: point {0:?} is in both blocks")]
    OverlappingBlocks(String),
    #[error("AlphaTooSmall: alpha = {0}, must be at least 1")]
    AlphaTooSmall(f64),
    #[error("CliqueBudgetExceeded: clique search visited more than {budget} nodes")]
    CliqueBudgetExceeded { budget: u64 },
    #[error("NoProgress: condition {condition} holds for no pair at any candidate threshold above {above}")]
    NoProgress { condition: String, above: f64 },
    #[error("NoThresholdFound: condition {0} never holds for the given blocks")]
    NoThresholdFound(String),
    #[error("UnknownCondition: {0:?} (expected \"always\" or \"p-alpha:<alpha>\")")]
    UnknownCondition(String),
    #[error(transparent)]
    Linkage(#[from] LinkageError),
}

fn blocks_ok(a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> Result<(), UnchainingError> {
    check_blocks(a, b, space).map_err(|e| match e {
        LinkageError::EmptyBlock => UnchainingError::EmptyBlock,
        LinkageError::OverlappingBlocks(l) => UnchainingError::OverlappingBlocks(l),
        other => other.into(),
    })
}

/// Dimension of the Rips complex `F_t(B)`: largest clique of the `d <= t`
/// graph on `block`, minus one.
pub fn rips_block_dim(block: &[usize], t: f64, space: &FiniteMetricSpace) -> Result<usize, UnchainingError> {
    rips_block_dim_with_budget(block, t, space, DEFAULT_NODE_BUDGET)
}

pub fn rips_block_dim_with_budget(
    block: &[usize],
    t: f64,
    space: &FiniteMetricSpace,
    budget: u64,
) -> Result<usize, UnchainingError> {
    if block.is_empty() {
        return Err(UnchainingError::EmptyBlock);
    }
    let g = ThresholdGraph::new(block, t, space);
    let mut nodes = 0;
    let size = max_clique_in(&g, g.all(), 1, &mut nodes, budget)
        .map_err(|_| UnchainingError::CliqueBudgetExceeded { budget })?;
    Ok(size - 1)
}

/// Largest dimension of a simplex of `F_t(B1 u B2)` meeting both blocks, or
/// `None` when no cross pair is within `t`.
pub fn cross_simplex_max_dim(
    b1: &[usize],
    b2: &[usize],
    t: f64,
    space: &FiniteMetricSpace,
) -> Result<Option<usize>, UnchainingError> {
    cross_simplex_max_dim_with_budget(b1, b2, t, space, DEFAULT_NODE_BUDGET)
}

pub fn cross_simplex_max_dim_with_budget(
    b1: &[usize],
    b2: &[usize],
    t: f64,
    space: &FiniteMetricSpace,
    budget: u64,
) -> Result<Option<usize>, UnchainingError> {
    blocks_ok(b1, b2, space)?;
    let points: Vec<usize> = b1.iter().chain(b2).copied().collect();
    let g = ThresholdGraph::new(&points, t, space);
    let n1 = b1.len();
    let mut best: Option<usize> = None;
    let mut nodes = 0;
    for x in 0..n1 {
        for y in g.neighbours(x).ones().filter(|&y| y >= n1) {
            let mut common: FixedBitSet = g.neighbours(x).clone();
            common.intersect_with(g.neighbours(y));
            let floor = best.map_or(0, |b| b.saturating_sub(2));
            if let Some(b) = best {
                if 2 + common.count_ones(..) <= b {
                    continue;
                }
            }
            let k = max_clique_in(&g, common, floor, &mut nodes, budget)
                .map_err(|_| UnchainingError::CliqueBudgetExceeded { budget })?;
            best = Some(best.map_or(k + 2, |b| b.max(k + 2)));
        }
    }
    Ok(best.map(|size| size - 1))
}

/// A condition on pairs of blocks parametrized by a threshold `R`.
pub trait Unchaining: Send + Sync {
    fn name(&self) -> String;

    fn satisfied(&self, a: &[usize], b: &[usize], r: f64, space: &FiniteMetricSpace) -> Result<bool, UnchainingError>;

    /// Sorted thresholds at which `satisfied` may change for this pair.
    fn candidate_thresholds(&self, a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> Vec<f64>;
}

/// The empty condition: every pair satisfies it at every threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Always;

impl Unchaining for Always {
    fn name(&self) -> String {
        "always".into()
    }

    fn satisfied(&self, _: &[usize], _: &[usize], _: f64, _: &FiniteMetricSpace) -> Result<bool, UnchainingError> {
        Ok(true)
    }

    fn candidate_thresholds(&self, _: &[usize], _: &[usize], space: &FiniteMetricSpace) -> Vec<f64> {
        space.distance_set().positive().to_vec()
    }
}

/// `P_alpha`: some simplex `D` of `F_R(B1 u B2)` meets both blocks and
/// `alpha * dim D >= min(dim F_R(B1), dim F_R(B2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PAlpha {
    alpha: f64,
    budget: u64,
}

impl PAlpha {
    pub fn new(alpha: f64) -> Result<Self, UnchainingError> {
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(UnchainingError::AlphaTooSmall(alpha));
        }
        Ok(Self {
            alpha,
            budget: DEFAULT_NODE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Unchaining for PAlpha {
    fn name(&self) -> String {
        format!("p-alpha:{}", self.alpha)
    }

    fn satisfied(&self, a: &[usize], b: &[usize], r: f64, space: &FiniteMetricSpace) -> Result<bool, UnchainingError> {
        let Some(cross) = cross_simplex_max_dim_with_budget(a, b, r, space, self.budget)? else {
            return Ok(false);
        };
        let need = rips_block_dim_with_budget(a, r, space, self.budget)?
            .min(rips_block_dim_with_budget(b, r, space, self.budget)?);
        Ok(self.alpha * cross as f64 >= need as f64)
    }

    fn candidate_thresholds(&self, _: &[usize], _: &[usize], space: &FiniteMetricSpace) -> Vec<f64> {
        space.distance_set().positive().to_vec()
    }
}

/// Built-in conditions selectable by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condition {
    Always,
    PAlpha(PAlpha),
}

impl Condition {
    fn inner(&self) -> &dyn Unchaining {
        match self {
            Condition::Always => &Always,
            Condition::PAlpha(p) => p,
        }
    }
}

impl Unchaining for Condition {
    fn name(&self) -> String {
        self.inner().name()
    }

    fn satisfied(&self, a: &[usize], b: &[usize], r: f64, space: &FiniteMetricSpace) -> Result<bool, UnchainingError> {
        self.inner().satisfied(a, b, r, space)
    }

    fn candidate_thresholds(&self, a: &[usize], b: &[usize], space: &FiniteMetricSpace) -> Vec<f64> {
        self.inner().candidate_thresholds(a, b, space)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Condition {
    type Err = UnchainingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "always" {
            return Ok(Condition::Always);
        }
        let alpha = s
            .strip_prefix("p-alpha:")
            .and_then(|a| a.parse::<f64>().ok())
            .ok_or_else(|| UnchainingError::UnknownCondition(s.to_string()))?;
        Ok(Condition::PAlpha(PAlpha::new(alpha)?))
    }
}

/// Smallest candidate threshold at which the pair satisfies `p`.
pub fn unchaining_threshold(
    p: &dyn Unchaining,
    a: &[usize],
    b: &[usize],
    space: &FiniteMetricSpace,
) -> Result<f64, UnchainingError> {
    blocks_ok(a, b, space)?;
    for r in p.candidate_thresholds(a, b, space) {
        if p.satisfied(a, b, r, space)? {
            return Ok(r);
        }
    }
    Err(UnchainingError::NoThresholdFound(p.name()))
}

/// The almost-standard recursion. Each round picks `R_i` by one of three
/// rules: the fresh minimum linkage after a merge, the next larger linkage
/// after a stall, or the least candidate threshold above `R_{i-1}` where
/// some pair satisfies `p`. Blocks are joined when `l <= R_i` and `p` holds.
pub fn run_almost_standard(
    space: &FiniteMetricSpace,
    linkage: &dyn Linkage,
    p: &dyn Unchaining,
) -> Result<(Dendrogram, RunTrace), UnchainingError> {
    let mut partition = Partition::singletons(space.len());
    let mut rounds: Vec<Round> = Vec::new();
    let mut changed = true;
    let mut prev = 0.0;
    while partition.len() > 1 {
        let values = pair_values(&partition, linkage, space)?;
        let blocks = partition.blocks();
        let (level, rule) = if changed {
            let r = values.iter().map(|v| v.2).fold(f64::INFINITY, f64::min);
            (r, ThresholdRule::Fresh)
        } else if let Some(r) = values.iter().map(|v| v.2).filter(|&v| v > prev).min_by(f64::total_cmp) {
            (r, ThresholdRule::NextLinkage)
        } else {
            (condition_threshold(&values, blocks, prev, p, space)?, ThresholdRule::Condition)
        };
        let mut edges = Vec::new();
        for &(i, j, v) in &values {
            if v <= level && p.satisfied(&blocks[i], &blocks[j], level, space)? {
                edges.push((i, j));
            }
        }
        let next = partition.merge_components(&edges);
        changed = next != partition;
        rounds.push(Round {
            level,
            rule,
            partition,
            edges,
        });
        partition = next;
        prev = level;
    }
    let trace = RunTrace {
        labels: space.labels().to_vec(),
        rounds,
        result: partition,
    };
    Ok((trace.dendrogram(), trace))
}

fn condition_threshold(
    values: &[(usize, usize, f64)],
    blocks: &[Vec<usize>],
    above: f64,
    p: &dyn Unchaining,
    space: &FiniteMetricSpace,
) -> Result<f64, UnchainingError> {
    let mut candidates: Vec<f64> = values
        .iter()
        .flat_map(|&(i, j, _)| p.candidate_thresholds(&blocks[i], &blocks[j], space))
        .filter(|&r| r > above)
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    for r in candidates {
        for &(i, j, _) in values {
            if p.satisfied(&blocks[i], &blocks[j], r, space)? {
                return Ok(r);
            }
        }
    }
    Err(UnchainingError::NoProgress {
        condition: p.name(),
        above,
    })
}

/// `SL(alpha)` computed directly over the ordered distance set: at each
/// positive distance `R`, blocks within single linkage `R` that satisfy
/// `P_alpha` at `R` merge.
pub fn sl_alpha(space: &FiniteMetricSpace, alpha: f64) -> Result<(Dendrogram, RunTrace), UnchainingError> {
    let p = PAlpha::new(alpha)?;
    let mut partition = Partition::singletons(space.len());
    let mut rounds = Vec::new();
    for &r in space.distance_set().positive() {
        if partition.len() == 1 {
            break;
        }
        let blocks = partition.blocks();
        let mut edges = Vec::new();
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if single(&blocks[i], &blocks[j], space) <= r && p.satisfied(&blocks[i], &blocks[j], r, space)? {
                    edges.push((i, j));
                }
            }
        }
        let next = partition.merge_components(&edges);
        rounds.push(Round {
            level: r,
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
