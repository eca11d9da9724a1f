//! One-parameter families of spaces that freeze the linkage between two
//! blocks while shrinking everything else.
//!
//! Values are written as `target + (1 - t) * (d - target)` rather than
//! `(1 - t) * d + t * target`, so the frozen cross distance is exactly `R`
//! at every `t` and cross distances that must stay at or above `R + delta`
//! cannot round below it.

use serde::{Deserialize, Serialize};

use crate::gh::Correspondence;
use crate::lab::LabError;
use crate::metric::{interval_space, FiniteMetricSpace, Validation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    Gamma,
    BridgeSingle,
    BridgeDouble,
}

#[derive(Debug, Clone)]
pub struct PathSpec {
    kind: PathKind,
    base: FiniteMetricSpace,
    b1: Vec<usize>,
    b2: Vec<usize>,
    bridge: Option<(usize, usize)>,
    r: f64,
    delta: f64,
}

fn check_split(base: &FiniteMetricSpace, b1: &[usize], b2: &[usize]) -> Result<(), LabError> {
    let mut seen = vec![0u8; base.len()];
    for &i in b1.iter().chain(b2) {
        if i >= base.len() {
            return Err(LabError::TrivialPartition);
        }
        seen[i] += 1;
    }
    if b1.is_empty() || b2.is_empty() || seen.iter().any(|&c| c != 1) {
        return Err(LabError::TrivialPartition);
    }
    Ok(())
}

impl PathSpec {
    /// The path `Gamma_R^{B1,B2}`: within-block distances scale by `1 - t`,
    /// cross distances move linearly to `R`, and `t = 1` is `I(R)`.
    pub fn gamma(base: FiniteMetricSpace, b1: Vec<usize>, b2: Vec<usize>, r: f64) -> Result<Self, LabError> {
        check_split(&base, &b1, &b2)?;
        if !(r > 0.0) || !r.is_finite() {
            return Err(LabError::InvalidParameter(format!("R must be positive, got {r}")));
        }
        Ok(Self {
            kind: PathKind::Gamma,
            base,
            b1,
            b2,
            bridge: None,
            r,
            delta: 0.0,
        })
    }

    /// The bridge path ending at `I(delta, R)` (when one block is a single
    /// point) or `I(delta, R, delta)`. `R` is the unique minimal cross
    /// distance and `delta` the smallest gap between distinct distances.
    pub fn bridge(base: FiniteMetricSpace, b1: Vec<usize>, b2: Vec<usize>) -> Result<Self, LabError> {
        check_split(&base, &b1, &b2)?;
        let (b1, b2) = if b1.len() == 1 { (b2, b1) } else { (b1, b2) };
        if b1.len() == 1 {
            return Err(LabError::InvalidParameter("a bridge path needs a block with at least two points".into()));
        }
        let mut best: Option<(usize, usize, f64)> = None;
        let mut tied = false;
        for &x in &b1 {
            for &y in &b2 {
                let d = base.d(x, y);
                match best {
                    Some((_, _, r)) if d == r => tied = true,
                    Some((_, _, r)) if d > r => {}
                    _ => {
                        best = Some((x, y, d));
                        tied = false;
                    }
                }
            }
        }
        let (x, y, r) = best.expect("blocks are nonempty");
        if tied {
            return Err(LabError::BridgeNotUnique);
        }
        let delta = base.distance_set().min_gap().expect("at least two points");
        let kind = if b2.len() == 1 {
            PathKind::BridgeSingle
        } else {
            PathKind::BridgeDouble
        };
        Ok(Self {
            kind,
            base,
            b1,
            b2,
            bridge: Some((x, y)),
            r,
            delta,
        })
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn blocks(&self) -> (&[usize], &[usize]) {
        (&self.b1, &self.b2)
    }

    pub fn bridge_pair(&self) -> Option<(usize, usize)> {
        self.bridge
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Zero for Gamma paths.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Lipschitz constant of the path in the identity correspondence, times 2.
    pub fn step_constant(&self) -> f64 {
        self.base.diameter() + self.r + 2.0 * self.delta
    }

    /// Block of each base point: 0 and 1 for the two blocks; the bridge
    /// kinds split off the bridge endpoints as their own classes, ordered as
    /// in the endpoint interval space.
    pub fn endpoint_class(&self) -> Vec<usize> {
        let mut class = vec![0; self.base.len()];
        match (self.kind, self.bridge) {
            (PathKind::Gamma, _) | (_, None) => {
                for &i in &self.b2 {
                    class[i] = 1;
                }
            }
            (PathKind::BridgeSingle, Some((p, q))) => {
                class[p] = 1;
                class[q] = 2;
            }
            (PathKind::BridgeDouble, Some((p, q))) => {
                for &i in &self.b2 {
                    class[i] = 3;
                }
                class[p] = 1;
                class[q] = 2;
            }
        }
        class
    }

    /// The space at parameter `t` in `[0, 1]`.
    pub fn at(&self, t: f64) -> Result<FiniteMetricSpace, LabError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(LabError::InvalidParameter(format!("path parameter {t} is outside [0, 1]")));
        }
        if t == 1.0 {
            let lengths: Vec<f64> = match self.kind {
                PathKind::Gamma => vec![self.r],
                PathKind::BridgeSingle => vec![self.delta, self.r],
                PathKind::BridgeDouble => vec![self.delta, self.r, self.delta],
            };
            return Ok(interval_space(&lengths)?);
        }
        let n = self.base.len();
        let s = 1.0 - t;
        let class = self.endpoint_class();
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = self.base.d(i, j);
                let v = match self.kind {
                    PathKind::Gamma => {
                        if class[i] == class[j] {
                            s * d
                        } else {
                            self.r + s * (d - self.r)
                        }
                    }
                    _ => self.bridge_value(class[i].min(class[j]), class[i].max(class[j]), d, t),
                };
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        let tolerance = 1e-12 * (self.base.diameter() + self.r);
        FiniteMetricSpace::build(self.base.labels().to_vec(), rows, &Validation::with_tolerance(tolerance))
            .map_err(|e| LabError::MetricViolation(e.to_string()))
    }

    /// Classes: 0 = rest of B1, 1 = b1, 2 = b2, 3 = rest of B2.
    fn bridge_value(&self, lo: usize, hi: usize, d: f64, t: f64) -> f64 {
        let s = 1.0 - t;
        let (r, delta) = (self.r, self.delta);
        match (lo, hi) {
            (0, 0) | (3, 3) => s * d,
            (0, 1) | (2, 3) => delta + s * (d - delta),
            (1, 2) => r,
            (0, 2) | (1, 3) => (r + delta) + s * (d - (r + delta)),
            (0, 3) => (r + delta) + (s * (d - (r + delta)) + t * delta),
            _ => unreachable!("classes are 0..=3 and distinct points of classes 1, 2 are unique"),
        }
    }

    /// Identity for `s < 1`; against the endpoint, each base point maps to
    /// its class.
    pub fn correspondence(
        &self,
        s1: f64,
        x1: &FiniteMetricSpace,
        s2: f64,
        x2: &FiniteMetricSpace,
    ) -> Result<Correspondence, LabError> {
        let class = self.endpoint_class();
        let map = |s: f64, i: usize| if s == 1.0 { class[i] } else { i };
        let pairs = (0..self.base.len()).map(|i| (map(s1, i), map(s2, i))).collect();
        Ok(Correspondence::new(pairs, x1, x2)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::constructions::prop_bridge_space;
    use crate::gh::gh_upper_from;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let labels: Vec<String> = (0..points.len()).map(|i| format!("q{i}")).collect();
        let rows = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        FiniteMetricSpace::new(labels, rows).unwrap()
    }

    #[test]
    fn gamma_endpoints() {
        let base = line(&[0.0, 1.0, 4.0, 6.0]);
        let path = PathSpec::gamma(base.clone(), vec![0, 1], vec![2, 3], 2.0).unwrap();
        assert_eq!(path.at(0.0).unwrap(), base);
        let end = path.at(1.0).unwrap();
        assert_eq!(end.to_rows(), vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
        assert_eq!(path.at(0.5).unwrap().d(1, 2), 2.5);
        assert!(PathSpec::gamma(base.clone(), vec![0, 1], vec![2], 2.0).is_err());
        assert!(PathSpec::gamma(base, vec![0, 1, 2, 3], vec![], 2.0).is_err());
    }

    #[test]
    fn bridge_endpoints() {
        let (space, b1, b2) = prop_bridge_space(1, 1.0).unwrap();
        let path = PathSpec::bridge(space.clone(), b1, b2).unwrap();
        assert_eq!(path.kind(), PathKind::BridgeDouble);
        assert_eq!((path.r(), path.delta()), (2.0, 1.0));
        assert_eq!(path.at(0.0).unwrap(), space);
        let end = path.at(1.0).unwrap();
        assert_eq!(end, interval_space(&[1.0, 2.0, 1.0]).unwrap());
        for t in [0.1, 0.5, 0.999] {
            let m = path.at(t).unwrap();
            assert_eq!(m.d(0, 3), 2.0);
            let tau = path.correspondence(t, &m, 1.0, &end).unwrap();
            assert!(gh_upper_from(&tau, &m, &end) <= (1.0 - t) * path.step_constant() / 2.0);
        }
    }

    #[test]
    fn bridge_requires_a_unique_edge() {
        let base = line(&[0.0, 1.0, 3.0]);
        assert!(PathSpec::bridge(base.clone(), vec![0, 1], vec![2]).is_ok());
        let single = PathSpec::bridge(base, vec![2], vec![0, 1]).unwrap();
        assert_eq!(single.kind(), PathKind::BridgeSingle);
        let tied = FiniteMetricSpace::new(
            vec!["a", "b", "c"],
            vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]],
        )
        .unwrap();
        assert_eq!(PathSpec::bridge(tied, vec![0, 1], vec![2]).unwrap_err(), LabError::BridgeNotUnique);
    }
}
