//! Correspondences, distortion and the Gromov-Hausdorff distance of small
//! finite spaces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::FiniteMetricSpace;

pub const DEFAULT_GH_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GhError {
    #[error("NotACorrespondence: point {label:?} of the {side} space has no partner")]
    NotACorrespondence { side: &'static str, label: String },
    #[error("NotACorrespondence: pair ({0}, {1}) is out of range")]
    OutOfRange(usize, usize),
}

/// A relation between the points of two spaces, stored as sorted index pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    /// Checks that both sides are covered.
    pub fn new(mut pairs: Vec<(usize, usize)>, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<Self, GhError> {
        pairs.sort_unstable();
        pairs.dedup();
        let mut hit_x = vec![false; x.len()];
        let mut hit_y = vec![false; y.len()];
        for &(a, b) in &pairs {
            if a >= x.len() || b >= y.len() {
                return Err(GhError::OutOfRange(a, b));
            }
            hit_x[a] = true;
            hit_y[b] = true;
        }
        if let Some(i) = hit_x.iter().position(|h| !h) {
            return Err(GhError::NotACorrespondence {
                side: "first",
                label: x.label(i).to_string(),
            });
        }
        if let Some(j) = hit_y.iter().position(|h| !h) {
            return Err(GhError::NotACorrespondence {
                side: "second",
                label: y.label(j).to_string(),
            });
        }
        Ok(Self { pairs })
    }

    /// Matches points with equal labels.
    pub fn by_label(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<Self, GhError> {
        let pairs = (0..x.len())
            .filter_map(|i| y.index_of(x.label(i)).ok().map(|j| (i, j)))
            .collect();
        Self::new(pairs, x, y)
    }

    /// Pairs `i` with `i`; both spaces must have the same size.
    pub fn identity(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<Self, GhError> {
        Self::new((0..x.len()).map(|i| (i, i)).collect(), x, y)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn to_labels(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Vec<(String, String)> {
        self.pairs
            .iter()
            .map(|&(a, b)| (x.label(a).to_string(), y.label(b).to_string()))
            .collect()
    }
}

fn raw_distortion(pairs: &[(usize, usize)], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut worst = 0.0f64;
    for (k, &(a, b)) in pairs.iter().enumerate() {
        for &(a2, b2) in &pairs[k + 1..] {
            worst = worst.max((x.d(a, a2) - y.d(b, b2)).abs());
        }
    }
    worst
}

/// `sup |d_X(x, x') - d_Y(y, y')|` over pairs of related pairs.
pub fn distortion(tau: &Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    raw_distortion(&tau.pairs, x, y)
}

/// Half the distortion of any correspondence bounds the distance from above.
pub fn gh_upper_from(tau: &Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    distortion(tau, x, y) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhResult {
    /// Best value found; the distance itself when `exact`.
    pub value: f64,
    pub exact: bool,
    pub lower: f64,
    pub upper: f64,
    pub witness: Vec<(String, String)>,
    pub nodes: u64,
}

fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one_side = |p: &[f64], q: &[f64]| {
        p.iter()
            .map(|&u| q.iter().map(|&v| (u - v).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_side(a, b).max(one_side(b, a))
}

/// An admissible bound: the largest of half the diameter gap, half the
/// Hausdorff distance between the distance sets, and half the worst
/// best-match Hausdorff distance between rows of distances.
pub fn gh_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let diam = (x.diameter() - y.diameter()).abs();
    let sets = hausdorff(x.distance_set().values(), y.distance_set().values());
    let rows = |p: &FiniteMetricSpace, q: &FiniteMetricSpace| {
        (0..p.len())
            .map(|i| {
                (0..q.len())
                    .map(|j| hausdorff(p.row(i), q.row(j)))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    let rows = rows(x, y).max(rows(y, x));
    diam.max(sets).max(rows) / 2.0
}

/// Branch-and-bound state. Every optimal correspondence contains the graph of
/// a map `f: X -> Y` together with one partner for each `y` outside the image
/// of `f`, so the search assigns `f(x)` for every `x` and then a partner for
/// each still uncovered `y`.
struct Search<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    x_order: Vec<usize>,
    y_order: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    covered: Vec<u32>,
    best: f64,
    best_pairs: Vec<(usize, usize)>,
    floor: f64,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    /// `cost[a * m + b]`: the distortion that adding `(a, b)` would cause
    /// against the pairs already chosen.
    fn extend_cost(&self, cost: &[f64], a: usize, b: usize) -> Vec<f64> {
        let m = self.y.len();
        let mut next = cost.to_vec();
        for a2 in 0..self.x.len() {
            let dx = self.x.d(a, a2);
            let row = &mut next[a2 * m..(a2 + 1) * m];
            for (b2, c) in row.iter_mut().enumerate() {
                let v = (dx - self.y.d(b, b2)).abs();
                if v > *c {
                    *c = v;
                }
            }
        }
        next
    }

    fn bound(&self, cost: &[f64], depth: usize, current: f64) -> f64 {
        let m = self.y.len();
        let mut lb = current;
        for &a in self.x_order.iter().skip(depth.min(self.x_order.len())) {
            let row_min = cost[a * m..(a + 1) * m].iter().copied().fold(f64::INFINITY, f64::min);
            lb = lb.max(row_min);
        }
        for b in 0..m {
            if self.covered[b] == 0 {
                let col_min = (0..self.x.len()).map(|a| cost[a * m + b]).fold(f64::INFINITY, f64::min);
                lb = lb.max(col_min);
            }
        }
        lb
    }

    fn run(&mut self, depth: usize, cost: Vec<f64>, current: f64) {
        if self.exhausted || self.best <= self.floor {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if self.bound(&cost, depth, current) >= self.best {
            return;
        }
        let n = self.x.len();
        let m = self.y.len();
        let (var_is_x, var) = if depth < n {
            (true, self.x_order[depth])
        } else {
            match self.y_order.iter().copied().find(|&b| self.covered[b] == 0) {
                Some(b) => (false, b),
                None => {
                    self.best = current;
                    self.best_pairs = self.pairs.clone();
                    return;
                }
            }
        };
        let mut values: Vec<(f64, usize)> = if var_is_x {
            (0..m).map(|b| (cost[var * m + b], b)).collect()
        } else {
            (0..n).map(|a| (cost[a * m + var], a)).collect()
        };
        values.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        for (c, val) in values {
            let next_current = current.max(c);
            if next_current >= self.best {
                break;
            }
            let (a, b) = if var_is_x { (var, val) } else { (val, var) };
            let next_cost = self.extend_cost(&cost, a, b);
            self.pairs.push((a, b));
            self.covered[b] += 1;
            self.run(if var_is_x { depth + 1 } else { depth }, next_cost, next_current);
            self.covered[b] -= 1;
            self.pairs.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

fn eccentricity_order(s: &FiniteMetricSpace) -> Vec<usize> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    let ecc: Vec<f64> = (0..s.len()).map(|i| s.row(i).iter().copied().fold(0.0, f64::max)).collect();
    order.sort_by(|&i, &j| ecc[j].total_cmp(&ecc[i]).then(i.cmp(&j)));
    order
}

fn diameter_pair(s: &FiniteMetricSpace) -> (usize, usize) {
    let mut best = (0, 0);
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s.d(i, j) > s.d(best.0, best.1) {
                best = (i, j);
            }
        }
    }
    best
}

/// Maps a diameter pair onto a diameter pair, then places every remaining
/// point at its cheapest partner.
fn greedy(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Vec<(usize, usize)> {
    let (x0, x1) = diameter_pair(x);
    let (y0, y1) = diameter_pair(y);
    let mut pairs = vec![(x0, y0)];
    if x1 != x0 {
        pairs.push((x1, y1));
    } else if y1 != y0 {
        pairs.push((x0, y1));
    }
    let cost = |pairs: &[(usize, usize)], a: usize, b: usize| {
        pairs
            .iter()
            .map(|&(a2, b2)| (x.d(a, a2) - y.d(b, b2)).abs())
            .fold(0.0, f64::max)
    };
    for a in eccentricity_order(x) {
        if pairs.iter().any(|p| p.0 == a) {
            continue;
        }
        let b = (0..y.len())
            .min_by(|&p, &q| cost(&pairs, a, p).total_cmp(&cost(&pairs, a, q)))
            .expect("nonempty");
        pairs.push((a, b));
    }
    for b in eccentricity_order(y) {
        if pairs.iter().any(|p| p.1 == b) {
            continue;
        }
        let a = (0..x.len())
            .min_by(|&p, &q| cost(&pairs, p, b).total_cmp(&cost(&pairs, q, b)))
            .expect("nonempty");
        pairs.push((a, b));
    }
    pairs
}

/// Exact Gromov-Hausdorff distance by branch and bound. When the node budget
/// runs out the result carries the best correspondence found and
/// `exact = false`.
pub fn gh_exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace, budget: u64) -> GhResult {
    let initial = greedy(x, y);
    let lower = gh_lower_bound(x, y);
    let mut search = Search {
        x,
        y,
        x_order: eccentricity_order(x),
        y_order: eccentricity_order(y),
        pairs: Vec::with_capacity(x.len() + y.len()),
        covered: vec![0; y.len()],
        best: raw_distortion(&initial, x, y),
        best_pairs: initial,
        floor: 2.0 * lower,
        nodes: 0,
        budget,
        exhausted: false,
    };
    search.run(0, vec![0.0; x.len() * y.len()], 0.0);
    let witness = Correspondence::new(search.best_pairs.clone(), x, y).expect("search yields correspondences");
    let value = search.best / 2.0;
    let exact = !search.exhausted;
    GhResult {
        value,
        exact,
        lower: if exact { value } else { lower },
        upper: value,
        witness: witness.to_labels(x, y),
        nodes: search.nodes,
    }
}

/// Both bounds without a search.
pub fn gh_bounds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> (f64, f64) {
    let pairs = greedy(x, y);
    (gh_lower_bound(x, y), raw_distortion(&pairs, x, y) / 2.0)
}
