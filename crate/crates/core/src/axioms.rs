//! Randomized checks of the linkage axioms: representation independence,
//! monotonicity under cross-distance inflation, and scale preservation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lab::random::{random_blocks, random_metric_with, rng};
use crate::linkage::Linkage;
use crate::metric::FiniteMetricSpace;

const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    pub block_a: Vec<String>,
    pub block_b: Vec<String>,
    pub transformation: String,
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub passed: bool,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl AxiomCheck {
    fn new() -> Self {
        Self {
            passed: true,
            checked: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, failure: impl FnOnce() -> Counterexample) {
        self.checked += 1;
        if !ok && self.passed {
            self.passed = false;
            self.counterexample = Some(failure());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub linkage: String,
    pub trials: usize,
    pub seed: u64,
    pub representation_independence: AxiomCheck,
    pub monotonicity: AxiomCheck,
    pub scale_preservation: AxiomCheck,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.representation_independence.passed && self.monotonicity.passed && self.scale_preservation.passed
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn names(space: &FiniteMetricSpace, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| space.label(i).to_string()).collect()
}

fn witness(space: &FiniteMetricSpace, a: &[usize], b: &[usize], what: String, before: f64, after: f64) -> Counterexample {
    Counterexample {
        labels: space.labels().to_vec(),
        dist: space.to_rows(),
        block_a: names(space, a),
        block_b: names(space, b),
        transformation: what,
        before,
        after,
    }
}

/// Runs `trials` random instances of each check. Spaces have 2 to 8 points.
pub fn axiom_harness(linkage: &dyn Linkage, trials: usize, seed: u64) -> AxiomReport {
    let mut r = rng(seed);
    let mut rep = AxiomCheck::new();
    let mut mono = AxiomCheck::new();
    let mut scale = AxiomCheck::new();
    for trial in 0..trials {
        let n = r.gen_range(2..=8);
        let space = random_metric_with(n, &mut r);
        let (a, b) = random_blocks(n, &mut r);
        let base = linkage.evaluate(&a, &b, &space);

        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let moved = permute(&space, &perm);
        let pa: Vec<usize> = a.iter().map(|&i| perm[i]).collect();
        let pb: Vec<usize> = b.iter().map(|&i| perm[i]).collect();
        let relabeled = linkage.evaluate(&pa, &pb, &moved);
        let swapped = linkage.evaluate(&b, &a, &space);
        rep.record(same(base, relabeled) && same(base, swapped), || {
            witness(&space, &a, &b, "relabel points or swap blocks".into(), base, relabeled.min(swapped))
        });

        let inflated = if trial % 2 == 0 {
            let c = r.gen_range(0.0..=space.diameter());
            inflate_all(&space, &a, &b, c).map(|m| (m, format!("add {c} to every cross distance")))
        } else {
            inflate_one(&space, &a, &b, &mut r)
        };
        if let Some((m, what)) = inflated {
            let after = linkage.evaluate(&a, &b, &m);
            mono.record(after >= base - REL_TOL * base.abs().max(1.0), || witness(&space, &a, &b, what, base, after));
        }

        let alpha = match r.gen_range(0..4) {
            0 => 2.0,
            1 => 0.5,
            _ => r.gen_range(0.1..10.0),
        };
        let scaled = space.scale(alpha).expect("alpha is positive");
        let after = linkage.evaluate(&a, &b, &scaled);
        scale.record(same(after, alpha * base), || {
            witness(&space, &a, &b, format!("scale by {alpha}"), alpha * base, after)
        });
    }
    AxiomReport {
        linkage: linkage.name().to_string(),
        trials,
        seed,
        representation_independence: rep,
        monotonicity: mono,
        scale_preservation: scale,
    }
}

/// Point `i` of `space` becomes point `perm[i]`.
fn permute(space: &FiniteMetricSpace, perm: &[usize]) -> FiniteMetricSpace {
    let n = space.len();
    let mut labels = vec![String::new(); n];
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        labels[perm[i]] = space.label(i).to_string();
        for j in 0..n {
            rows[perm[i]][perm[j]] = space.d(i, j);
        }
    }
    FiniteMetricSpace::new(labels, rows).expect("a permutation of a metric is a metric")
}

/// The subspace on `A u B` with `c` added to every cross distance, which
/// stays a metric. Returns it with blocks re-indexed to match `a`, `b`.
fn inflate_all(space: &FiniteMetricSpace, a: &[usize], b: &[usize], c: f64) -> Option<FiniteMetricSpace> {
    let mut rows = space.to_rows();
    for &x in a {
        for &y in b {
            rows[x][y] += c;
            rows[y][x] += c;
        }
    }
    let others: Vec<usize> = (0..space.len()).filter(|i| !a.contains(i) && !b.contains(i)).collect();
    // Points outside both blocks would see broken triangles; push them far away.
    let far = 2.0 * (space.diameter() + c);
    for &o in &others {
        for j in 0..space.len() {
            if j != o {
                rows[o][j] = far;
                rows[j][o] = far;
            }
        }
    }
    FiniteMetricSpace::new(space.labels().to_vec(), rows).ok()
}

/// Raises a single cross distance by a random share of its triangle slack.
fn inflate_one(
    space: &FiniteMetricSpace,
    a: &[usize],
    b: &[usize],
    r: &mut impl Rng,
) -> Option<(FiniteMetricSpace, String)> {
    let x = *a.choose(r)?;
    let z = *b.choose(r)?;
    let slack = (0..space.len())
        .filter(|&y| y != x && y != z)
        .map(|y| space.d(x, y) + space.d(y, z) - space.d(x, z))
        .fold(f64::INFINITY, f64::min);
    let slack = if slack.is_finite() { slack } else { space.diameter() };
    let bump = r.gen_range(0.0..=1.0) * slack;
    let mut rows = space.to_rows();
    rows[x][z] += bump;
    rows[z][x] += bump;
    let m = FiniteMetricSpace::new(space.labels().to_vec(), rows).ok()?;
    Some((m, format!("raise d({}, {}) by {bump}", space.label(x), space.label(z))))
}
