//! Named spaces: the bridge space for `P_alpha` and the complete-linkage
//! counterexample family `(X_k, U_k)`.

use crate::gh::Correspondence;
use crate::lab::LabError;
use crate::metric::{FiniteMetricSpace, Ultrametric, Validation};

/// Two blocks of `alpha + 2` points at mutual distance 1, joined by a single
/// edge `x0 y0` of length 2; every other cross distance is `2 + gap`.
/// Returns the space and the two blocks (`x*` first, then `y*`).
pub fn prop_bridge_space(alpha: usize, gap: f64) -> Result<(FiniteMetricSpace, Vec<usize>, Vec<usize>), LabError> {
    if alpha < 1 {
        return Err(LabError::InvalidParameter(format!("alpha must be at least 1, got {alpha}")));
    }
    if !(gap > 0.0 && gap <= 1.0) {
        return Err(LabError::InvalidParameter(format!("gap must lie in (0, 1], got {gap}")));
    }
    let side = alpha + 2;
    let n = 2 * side;
    let mut labels: Vec<String> = (0..side).map(|i| format!("x{i}")).collect();
    labels.extend((0..side).map(|i| format!("y{i}")));
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            rows[i][j] = if (i < side) == (j < side) {
                1.0
            } else if i % side == 0 && j % side == 0 {
                2.0
            } else {
                2.0 + gap
            };
        }
    }
    let space = FiniteMetricSpace::build(labels, rows, &Validation::strict())?;
    Ok((space, (0..side).collect(), (side..n).collect()))
}

#[derive(Debug, Clone)]
pub struct ClCounterexample {
    pub k: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub x: FiniteMetricSpace,
    pub u: Ultrametric,
    /// `a_i -> ~a_i`, `b_i -> ~b_i`.
    pub tau: Correspondence,
}

/// Index `i` runs over `-2..=k`; `a_i` sits at position `i + 2`, `b_i` at
/// `k + 3 + i + 2`.
pub fn cl_counterexample(k: usize) -> Result<ClCounterexample, LabError> {
    let side = k + 3;
    let kp1 = (k + 1) as f64;
    let delta = 1.0 / kp1;
    let epsilon = delta / 2.0;
    let step = |m: i64| -> f64 {
        if m <= 0 {
            0.0
        } else {
            m as f64 / (2.0 * kp1)
        }
    };
    let index = |p: usize| -> (bool, i64) { (p < side, (p % side) as i64 - 2) };
    let within = |i: i64, j: i64| -> f64 {
        let m = i.max(j);
        if m == -1 {
            0.5
        } else if m <= 0 {
            1.0
        } else {
            1.0 + step(m)
        }
    };
    let n = 2 * side;
    let mut d = vec![vec![0.0; n]; n];
    let mut u = vec![vec![0.0; n]; n];
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            let ((sp, i), (sq, j)) = (index(p), index(q));
            let m = i.max(j);
            if sp == sq {
                d[p][q] = within(i, j);
                u[p][q] = within(i, j);
            } else {
                d[p][q] = match (i.min(j), m) {
                    (-2, -2) => 1.0,
                    (-2, -1) => 1.0 + epsilon,
                    _ => 1.0 + step(m) + delta,
                };
                u[p][q] = 1.0 + step(m);
            }
        }
    }
    let names = |prefix: &str| -> Vec<String> {
        ["a", "b"]
            .iter()
            .flat_map(|s| (-2..=k as i64).map(move |i| format!("{prefix}{s}{i}")))
            .collect()
    };
    let x = FiniteMetricSpace::build(names(""), d, &Validation::strict())?;
    let u = Ultrametric::new(FiniteMetricSpace::build(names("~"), u, &Validation::strict())?)?;
    let tau = Correspondence::new((0..n).map(|i| (i, i)).collect(), &x, &u)?;
    Ok(ClCounterexample {
        k,
        delta,
        epsilon,
        x,
        u,
        tau,
    })
}

/// The closed-form complete-linkage height of `a_{-2}, b_{-2}`:
/// `1 + k / (2(k+1)) + 1 / (k+1)`.
pub fn cl_counterexample_top(k: usize) -> f64 {
    let kp1 = (k + 1) as f64;
    1.0 + k as f64 / (2.0 * kp1) + 1.0 / kp1
}
