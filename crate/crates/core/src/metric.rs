//! Finite metric and ultrametric spaces, distance sets and partitions.
//!
//! Spaces are immutable once built. Points are addressed by index in label
//! order; everything that leaves the library reports labels.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("EmptyInput: a space needs at least one point")]
    EmptyInput,
    #[error("NotSquare: expected a {expected}x{expected} matrix, row {row} has {found} entries")]
    NotSquare {
        expected: usize,
        row: usize,
        found: usize,
    },
    #[error("DuplicateLabel: label {0:?} appears more than once")]
    DuplicateLabel(String),
    #[error("NonFiniteDistance: d({0},{1}) is not finite")]
    NonFiniteDistance(String, String),
    #[error("NonzeroDiagonal: d({0},{0}) = {1}")]
    NonzeroDiagonal(String, f64),
    #[error("NegativeDistance: d({0},{1}) = {2}")]
    NegativeDistance(String, String, f64),
    #[error("AsymmetricMatrix: d({0},{1}) = {2} but d({1},{0}) = {3}")]
    AsymmetricMatrix(String, String, f64, f64),
    #[error("DuplicatePoint: d({0},{1}) = 0")]
    DuplicatePoint(String, String),
    #[error("TriangleViolation: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    TriangleViolation(String, String, String),
    #[error("NotUltrametric: d({0},{2}) > max(d({0},{1}), d({1},{2}))")]
    NotUltrametric(String, String, String),
    #[error("NonpositiveScale: scale factor {0} must be positive")]
    NonpositiveScale(f64),
    #[error("NonpositiveLength: interval lengths must be positive, got {0}")]
    NonpositiveLength(f64),
    #[error("EmptySubset: cannot restrict to an empty set of points")]
    EmptySubset,
    #[error("UnknownLabel: {0:?}")]
    UnknownLabel(String),
    #[error("InvalidPartition: {0}")]
    InvalidPartition(String),
}

/// Validation knobs for user-supplied matrices.
///
/// `tolerance` relaxes the symmetry and triangle checks by an absolute
/// amount; `allow_pseudometric` collapses zero-distance points onto the first
/// such label instead of rejecting them.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Validation {
    pub tolerance: f64,
    pub allow_pseudometric: bool,
}

impl Validation {
    pub fn strict() -> Self {
        Self::default()
    }

    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }
}

/// A finite set of labeled points with a validated distance matrix.
#[derive(Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    /// `(dropped, representative)` pairs from pseudometric collapsing.
    aliases: Vec<(String, String)>,
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("labels", &self.labels)
            .field("dist", &self.to_rows())
            .finish()
    }
}

impl FiniteMetricSpace {
    /// Builds a space under strict validation.
    pub fn new<S: Into<String>>(labels: Vec<S>, rows: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        Self::build(labels, rows, &Validation::strict())
    }

    pub fn build<S: Into<String>>(
        labels: Vec<S>,
        rows: Vec<Vec<f64>>,
        validation: &Validation,
    ) -> Result<Self, MetricError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::EmptyInput);
        }
        if rows.len() != n {
            return Err(MetricError::NotSquare {
                expected: n,
                row: rows.len().min(n),
                found: rows.len(),
            });
        }
        let mut seen = HashMap::with_capacity(n);
        for l in &labels {
            if seen.insert(l.as_str(), ()).is_some() {
                return Err(MetricError::DuplicateLabel(l.clone()));
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::NotSquare {
                    expected: n,
                    row: i,
                    found: row.len(),
                });
            }
            dist.extend_from_slice(row);
        }
        let space = Self {
            labels,
            dist,
            aliases: Vec::new(),
        };
        space.check_entries(validation.tolerance)?;
        let space = if validation.allow_pseudometric {
            space.collapse_duplicates()
        } else {
            space.check_distinct()?;
            space
        };
        space.check_triangle(validation.tolerance)?;
        Ok(space)
    }

    /// Internal constructor for matrices that are correct by construction.
    pub(crate) fn from_parts(labels: Vec<String>, dist: Vec<f64>) -> Self {
        debug_assert_eq!(labels.len() * labels.len(), dist.len());
        Self {
            labels,
            dist,
            aliases: Vec::new(),
        }
    }

    fn check_entries(&self, tol: f64) -> Result<(), MetricError> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                let v = self.d(i, j);
                if !v.is_finite() {
                    return Err(MetricError::NonFiniteDistance(
                        self.labels[i].clone(),
                        self.labels[j].clone(),
                    ));
                }
                if i == j {
                    if v != 0.0 {
                        return Err(MetricError::NonzeroDiagonal(self.labels[i].clone(), v));
                    }
                    continue;
                }
                if v < 0.0 {
                    return Err(MetricError::NegativeDistance(
                        self.labels[i].clone(),
                        self.labels[j].clone(),
                        v,
                    ));
                }
                if j > i && (v - self.d(j, i)).abs() > tol {
                    return Err(MetricError::AsymmetricMatrix(
                        self.labels[i].clone(),
                        self.labels[j].clone(),
                        v,
                        self.d(j, i),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_distinct(&self) -> Result<(), MetricError> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                if self.d(i, j) == 0.0 {
                    return Err(MetricError::DuplicatePoint(
                        self.labels[i].clone(),
                        self.labels[j].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_triangle(&self, tol: f64) -> Result<(), MetricError> {
        let n = self.len();
        for i in 0..n {
            for k in i + 1..n {
                let dik = self.d(i, k);
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    if dik > self.d(i, j) + self.d(j, k) + tol {
                        return Err(MetricError::TriangleViolation(
                            self.labels[i].clone(),
                            self.labels[j].clone(),
                            self.labels[k].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn collapse_duplicates(self) -> Self {
        let n = self.len();
        let mut rep: Vec<usize> = (0..n).collect();
        for i in 0..n {
            if rep[i] != i {
                continue;
            }
            for j in i + 1..n {
                if rep[j] == j && self.d(i, j) == 0.0 {
                    rep[j] = i;
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&i| rep[i] == i).collect();
        let aliases = (0..n)
            .filter(|&i| rep[i] != i)
            .map(|i| (self.labels[i].clone(), self.labels[rep[i]].clone()))
            .collect();
        let mut out = self.restrict_indices(&keep);
        out.aliases = aliases;
        out
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Labels dropped by pseudometric collapsing, with their representative.
    pub fn aliases(&self) -> &[(String, String)] {
        &self.aliases
    }

    pub fn index_of(&self, label: &str) -> Result<usize, MetricError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| MetricError::UnknownLabel(label.to_string()))
    }

    /// Resolves labels to sorted, deduplicated indices.
    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, MetricError> {
        let mut idx = labels
            .iter()
            .map(|l| self.index_of(l.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.labels.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Sorted set of all pairwise distances, including 0.
    pub fn distance_set(&self) -> DistanceSet {
        let mut values = self.dist.clone();
        values.push(0.0);
        values.sort_by(f64::total_cmp);
        values.dedup();
        DistanceSet(values)
    }

    /// Strong triangle inequality on every triple.
    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric_violation().is_none()
    }

    fn ultrametric_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for k in i + 1..n {
                let dik = self.d(i, k);
                for j in 0..n {
                    if j != i && j != k && dik > self.d(i, j).max(self.d(j, k)) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn scale(&self, alpha: f64) -> Result<Self, MetricError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(MetricError::NonpositiveScale(alpha));
        }
        Ok(Self::from_parts(
            self.labels.clone(),
            self.dist.iter().map(|v| v * alpha).collect(),
        ))
    }

    /// Connected components of the graph with edges `d(i, j) <= t`.
    pub fn t_components(&self, t: f64) -> Partition {
        let n = self.len();
        let mut uf = UnionFind::<usize>::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if self.d(i, j) <= t {
                    uf.union(i, j);
                }
            }
        }
        Partition::from_assignment(&uf.into_labeling())
    }

    /// True iff the points of `block` are pairwise joined by chains of steps `<= t`.
    pub fn is_t_connected(&self, block: &[usize], t: f64) -> bool {
        if block.len() <= 1 {
            return true;
        }
        let mut reached = vec![false; block.len()];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(a) = stack.pop() {
            for b in 0..block.len() {
                if !reached[b] && self.d(block[a], block[b]) <= t {
                    reached[b] = true;
                    stack.push(b);
                }
            }
        }
        reached.into_iter().all(|r| r)
    }

    pub fn restrict<S: AsRef<str>>(&self, subset: &[S]) -> Result<Self, MetricError> {
        if subset.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        let idx = self.indices_of(subset)?;
        Ok(self.restrict_indices(&idx))
    }

    /// Induced subspace on `idx`, keeping the given order.
    pub fn restrict_indices(&self, idx: &[usize]) -> Self {
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let mut dist = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                dist.push(self.d(i, j));
            }
        }
        Self::from_parts(labels, dist)
    }

    /// Same matrix under new labels.
    pub fn relabel<S: Into<String>>(&self, labels: Vec<S>) -> Result<Self, MetricError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.len() {
            return Err(MetricError::NotSquare {
                expected: labels.len(),
                row: 0,
                found: self.len(),
            });
        }
        Self::new(labels, self.to_rows())
    }
}

/// The isometry type of `{0, a1, a1+a2, ...}` on the line, with points `p0..pn`.
pub fn interval_space(lengths: &[f64]) -> Result<FiniteMetricSpace, MetricError> {
    if lengths.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    if let Some(&bad) = lengths.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
        return Err(MetricError::NonpositiveLength(bad));
    }
    let n = lengths.len() + 1;
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in i + 1..n {
            acc += lengths[j - 1];
            dist[i * n + j] = acc;
            dist[j * n + i] = acc;
        }
    }
    Ok(FiniteMetricSpace::from_parts(labels, dist))
}

/// A metric space satisfying the strong triangle inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct Ultrametric(FiniteMetricSpace);

impl Ultrametric {
    pub fn new(space: FiniteMetricSpace) -> Result<Self, MetricError> {
        match space.ultrametric_violation() {
            None => Ok(Self(space)),
            Some((i, j, k)) => Err(MetricError::NotUltrametric(
                space.labels[i].clone(),
                space.labels[j].clone(),
                space.labels[k].clone(),
            )),
        }
    }

    pub(crate) fn new_unchecked(space: FiniteMetricSpace) -> Self {
        debug_assert!(space.is_ultrametric());
        Self(space)
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.0
    }

    pub fn into_space(self) -> FiniteMetricSpace {
        self.0
    }
}

impl Deref for Ultrametric {
    type Target = FiniteMetricSpace;

    fn deref(&self) -> &FiniteMetricSpace {
        &self.0
    }
}

/// Strictly increasing list of distances starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSet(Vec<f64>);

impl DistanceSet {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn positive(&self) -> &[f64] {
        &self.0[1..]
    }

    /// Smallest gap between consecutive values, or `None` for a single point.
    pub fn min_gap(&self) -> Option<f64> {
        self.0.windows(2).map(|w| w[1] - w[0]).reduce(f64::min)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.0.binary_search_by(|x| x.total_cmp(&v)).is_ok()
    }
}

/// A partition of `0..n` in canonical form: each block sorted, blocks sorted
/// by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn singletons(n: usize) -> Self {
        Self {
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            blocks: vec![(0..n).collect()],
        }
    }

    /// Validates that `blocks` is a partition of `0..n`.
    pub fn from_blocks(blocks: Vec<Vec<usize>>, n: usize) -> Result<Self, MetricError> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(MetricError::InvalidPartition("empty block".into()));
            }
            for &i in b {
                if i >= n {
                    return Err(MetricError::InvalidPartition(format!("index {i} out of range")));
                }
                if seen[i] {
                    return Err(MetricError::InvalidPartition(format!(
                        "point {i} appears in two blocks"
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(MetricError::InvalidPartition(format!("point {i} is not covered")));
        }
        Ok(Self::canonical(blocks))
    }

    pub(crate) fn canonical(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { blocks }
    }

    /// Groups points by an arbitrary component id per point.
    pub fn from_assignment(ids: &[usize]) -> Self {
        let mut by_id: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &id) in ids.iter().enumerate() {
            by_id.entry(id).or_default().push(i);
        }
        Self::canonical(by_id.into_values().collect())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn num_points(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block index of each point.
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_points()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                out[i] = b;
            }
        }
        out
    }

    /// True iff every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.num_points() != coarser.num_points() {
            return false;
        }
        let owner = coarser.assignment();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| owner[i] == owner[b[0]]))
    }

    /// Merges blocks joined by `edges` (pairs of block indices) and returns
    /// the quotient partition.
    pub fn merge_components(&self, edges: &[(usize, usize)]) -> Partition {
        let mut uf = UnionFind::<usize>::new(self.blocks.len());
        for &(a, b) in edges {
            uf.union(a, b);
        }
        let comp = uf.into_labeling();
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for (b, block) in self.blocks.iter().enumerate() {
            groups.entry(comp[b]).or_default().extend_from_slice(block);
        }
        Self::canonical(groups.into_values().collect())
    }

    pub fn to_labels(&self, labels: &[String]) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| labels[i].clone()).collect())
            .collect()
    }
}
