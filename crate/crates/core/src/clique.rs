//! Maximum cliques of threshold graphs, used for Vietoris-Rips dimensions.

use fixedbitset::FixedBitSet;

use crate::metric::FiniteMetricSpace;

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExceeded {
    pub nodes: u64,
}

/// Adjacency of the graph on `points` with an edge when `d <= t`.
pub(crate) struct ThresholdGraph {
    adj: Vec<FixedBitSet>,
}

impl ThresholdGraph {
    pub(crate) fn new(points: &[usize], t: f64, space: &FiniteMetricSpace) -> Self {
        let n = points.len();
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if space.d(points[i], points[j]) <= t {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        Self { adj }
    }

    pub(crate) fn len(&self) -> usize {
        self.adj.len()
    }

    pub(crate) fn neighbours(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub(crate) fn all(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }
}

/// Size of a largest clique inside `candidates`, searched with pivoted
/// Bron-Kerbosch and a size bound. Only cliques larger than `floor` matter;
/// the result is `max(floor, best)`.
pub(crate) fn max_clique_in(
    g: &ThresholdGraph,
    candidates: FixedBitSet,
    floor: usize,
    nodes: &mut u64,
    budget: u64,
) -> Result<usize, BudgetExceeded> {
    let mut best = floor;
    let excluded = FixedBitSet::with_capacity(g.len());
    expand(g, 0, candidates, excluded, &mut best, nodes, budget)?;
    Ok(best)
}

fn expand(
    g: &ThresholdGraph,
    size: usize,
    p: FixedBitSet,
    mut x: FixedBitSet,
    best: &mut usize,
    nodes: &mut u64,
    budget: u64,
) -> Result<(), BudgetExceeded> {
    *nodes += 1;
    if *nodes > budget {
        return Err(BudgetExceeded { nodes: *nodes });
    }
    let remaining = p.count_ones(..);
    if remaining == 0 {
        *best = (*best).max(size);
        return Ok(());
    }
    if size + remaining <= *best {
        return Ok(());
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| g.neighbours(u).intersection(&p).count())
        .expect("p is nonempty");
    let mut p = p;
    let branch: Vec<usize> = p.difference(g.neighbours(pivot)).collect();
    for v in branch {
        let mut np = p.clone();
        np.intersect_with(g.neighbours(v));
        let mut nx = x.clone();
        nx.intersect_with(g.neighbours(v));
        expand(g, size + 1, np, nx, best, nodes, budget)?;
        p.remove(v);
        x.insert(v);
        if size + p.count_ones(..) <= *best {
            break;
        }
    }
    Ok(())
}

/// Largest clique size of the threshold graph on `points`.
pub fn max_clique_size(
    points: &[usize],
    t: f64,
    space: &FiniteMetricSpace,
    budget: u64,
) -> Result<usize, BudgetExceeded> {
    if points.is_empty() {
        return Ok(0);
    }
    let g = ThresholdGraph::new(points, t, space);
    let mut nodes = 0;
    max_clique_in(&g, g.all(), 1, &mut nodes, budget)
}
