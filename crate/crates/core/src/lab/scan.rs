//! Bisection along a path for the point where a method's behaviour at `R`
//! flips.

use serde::{Deserialize, Serialize};

use crate::dendrogram::Dendrogram;
use crate::gh::{gh_exact, gh_lower_bound, gh_upper_from};
use crate::lab::paths::PathSpec;
use crate::lab::LabError;
use crate::metric::FiniteMetricSpace;
use crate::method::MethodSpec;

/// Spaces up to this size get an exact output gap.
pub const EXACT_GH_MAX_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub method: MethodSpec,
    pub r: f64,
    pub delta: f64,
    pub s1: f64,
    pub s2: f64,
    pub steps: usize,
    /// Whether the blocks are merged at level `R` on the `s1` and `s2` sides.
    pub merged_at_r: [bool; 2],
    /// Half the distortion of the path correspondence between the inputs.
    pub input_gap: f64,
    /// `(s2 - s1) * (diam + R + 2 delta) / 2`.
    pub input_gap_bound: f64,
    /// A certified lower bound on the distance between the two outputs.
    pub output_gap: f64,
    /// True when `output_gap` is the exact distance.
    pub output_gap_exact: bool,
    pub output_gap_nodes: u64,
    /// `output_gap >= delta / 2 - 1e-9`.
    pub exceeds_half_delta: bool,
}

/// Whether some block at level `r` meets both sides. `side[i]` is the side
/// of point `i` of the space the dendrogram was built on.
fn merged_at(d: &Dendrogram, r: f64, side: &[bool]) -> bool {
    d.partition_at(r)
        .blocks()
        .iter()
        .any(|b| b.iter().any(|&i| side[i]) && b.iter().any(|&i| !side[i]))
}

pub fn instability_scan(method: &MethodSpec, path: &PathSpec, tol: f64, gh_budget: u64) -> Result<WitnessPair, LabError> {
    if !(tol > 0.0) {
        return Err(LabError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let r = path.r();
    let (b1, _) = path.blocks();
    let inner: Vec<bool> = (0..path.base().len()).map(|i| !b1.contains(&i)).collect();
    // Point `c` of the endpoint is the class `c`; classes from B1 come first.
    let class = path.endpoint_class();
    let b1_classes = b1.iter().map(|&i| class[i]).max().unwrap_or(0) + 1;
    let top = class.iter().copied().max().unwrap_or(0);
    let outer: Vec<bool> = (0..=top).map(|c| c >= b1_classes).collect();
    let probe = |t: f64| -> Result<(FiniteMetricSpace, Dendrogram, bool), LabError> {
        let space = path.at(t)?;
        let (d, _) = method.run(&space)?;
        let side = if t == 1.0 { &outer } else { &inner };
        let merged = merged_at(&d, r, side);
        Ok((space, d, merged))
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut low = probe(lo)?;
    let mut high = probe(hi)?;
    if low.2 == high.2 {
        return Err(LabError::NoBehaviorFlip { merged: low.2 });
    }
    let mut steps = 0;
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let m = probe(mid)?;
        steps += 1;
        if m.2 == low.2 {
            lo = mid;
            low = m;
        } else {
            hi = mid;
            high = m;
        }
    }
    let tau = path.correspondence(lo, &low.0, hi, &high.0)?;
    let input_gap = gh_upper_from(&tau, &low.0, &high.0);
    let (u1, u2) = (low.1.eta(), high.1.eta());
    let (output_gap, output_gap_exact, output_gap_nodes) =
        if u1.len() <= EXACT_GH_MAX_POINTS && u2.len() <= EXACT_GH_MAX_POINTS {
            let g = gh_exact(&u1, &u2, gh_budget);
            (g.lower, g.exact, g.nodes)
        } else {
            (gh_lower_bound(&u1, &u2), false, 0)
        };
    let delta = path.delta();
    Ok(WitnessPair {
        method: *method,
        r,
        delta,
        s1: lo,
        s2: hi,
        steps,
        merged_at_r: [low.2, high.2],
        input_gap,
        input_gap_bound: (hi - lo) * path.step_constant() / 2.0,
        output_gap,
        output_gap_exact,
        output_gap_nodes,
        exceeds_half_delta: output_gap >= delta / 2.0 - 1e-9,
    })
}
