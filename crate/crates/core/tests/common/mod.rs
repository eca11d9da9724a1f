//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use hcstab_core::FiniteMetricSpace;

fn dis(pairs: &[(usize, usize)], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut worst: f64 = 0.0;
    for &(a, b) in pairs {
        for &(c, e) in pairs {
            worst = worst.max((x.d(a, c) - y.d(b, e)).abs());
        }
    }
    worst
}

/// GH distance by enumerating every subset of `X x Y` that is a
/// correspondence. Only for `|X| * |Y| <= 12`.
pub fn gh_subsets(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (n, m) = (x.len(), y.len());
    assert!(n * m <= 12);
    let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << all.len()) {
        let pairs: Vec<_> = (0..all.len()).filter(|&k| mask >> k & 1 == 1).map(|k| all[k]).collect();
        let covers_x = (0..n).all(|a| pairs.iter().any(|p| p.0 == a));
        let covers_y = (0..m).all(|b| pairs.iter().any(|p| p.1 == b));
        if covers_x && covers_y {
            best = best.min(dis(&pairs, x, y));
        }
    }
    best / 2.0
}

/// GH distance as the minimum over pairs of maps `f: X -> Y`, `g: Y -> X` of
/// the distortion of `graph(f) u graph(g)^T`. Every correspondence contains
/// such a union, so this is exact.
pub fn gh_maps(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (n, m) = (x.len(), y.len());
    let nf = m.pow(n as u32);
    let ng = n.pow(m as u32);
    let mut best = f64::INFINITY;
    let mut pairs = Vec::with_capacity(n + m);
    for fi in 0..nf {
        for gi in 0..ng {
            pairs.clear();
            let mut c = fi;
            for a in 0..n {
                pairs.push((a, c % m));
                c /= m;
            }
            let mut c = gi;
            for b in 0..m {
                pairs.push((c % n, b));
                c /= n;
            }
            best = best.min(dis(&pairs, x, y));
        }
    }
    best / 2.0
}

/// Largest `S` within `points` with `d <= t` on every pair of `S`, by subset
/// enumeration. With `must_meet`, `S` has to meet both given sets.
pub fn clique_oracle(space: &FiniteMetricSpace, points: &[usize], t: f64, must_meet: Option<(&[usize], &[usize])>) -> usize {
    let k = points.len();
    assert!(k <= 16);
    let mut best = 0;
    for mask in 1u32..(1 << k) {
        let s: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| points[i]).collect();
        if s.len() <= best {
            continue;
        }
        if let Some((a, b)) = must_meet {
            if !s.iter().any(|p| a.contains(p)) || !s.iter().any(|p| b.contains(p)) {
                continue;
            }
        }
        if s.iter().all(|&p| s.iter().all(|&q| p == q || space.d(p, q) <= t)) {
            best = s.len();
        }
    }
    best
}

/// A space whose `d <= 1` graph is exactly `adj`: edges at 1, non-edges at 2.
pub fn graph_space(adj: &[Vec<bool>]) -> FiniteMetricSpace {
    let n = adj.len();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else if adj[i][j] { 1.0 } else { 2.0 }).collect())
        .collect();
    FiniteMetricSpace::new((0..n).map(|i| format!("v{i}")).collect(), rows).unwrap()
}

/// Maximal subdominant ultrametric: minimax path distance, which is the
/// ultrametric single linkage must produce.
pub fn minimax(space: &FiniteMetricSpace) -> Vec<Vec<f64>> {
    let n = space.len();
    let mut u = space.to_rows();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = u[i][k].max(u[k][j]);
                if via < u[i][j] {
                    u[i][j] = via;
                }
            }
        }
    }
    u
}

/// Connected components of the `d <= t` graph by depth-first search, as
/// sorted blocks sorted by first element.
pub fn components(space: &FiniteMetricSpace, t: f64) -> Vec<Vec<usize>> {
    let n = space.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut block = vec![];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(p) = stack.pop() {
            block.push(p);
            for q in 0..n {
                if !seen[q] && space.d(p, q) <= t {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        block.sort_unstable();
        out.push(block);
    }
    out
}

/// The same space with points listed in the order `perm`.
pub fn permuted(space: &FiniteMetricSpace, perm: &[usize]) -> FiniteMetricSpace {
    let labels = perm.iter().map(|&i| space.label(i).to_string()).collect::<Vec<_>>();
    let rows = perm.iter().map(|&i| perm.iter().map(|&j| space.d(i, j)).collect()).collect();
    FiniteMetricSpace::new(labels, rows).unwrap()
}
