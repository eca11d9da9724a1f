//! Dendrograms as right-continuous step functions from thresholds to nested
//! partitions, and the bijection with ultrametrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, MetricError, Partition, Ultrametric};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DendrogramError {
    #[error("LengthMismatch: {breakpoints} breakpoints but {partitions} partitions")]
    LengthMismatch { breakpoints: usize, partitions: usize },
    #[error("UnsortedBreakpoints: breakpoint {index} is not larger than its predecessor")]
    UnsortedBreakpoints { index: usize },
    #[error("NotSingletonsAtZero: the first breakpoint must be 0 with all points separate")]
    NotSingletonsAtZero,
    #[error("NoTopMerge: the last partition must be a single block")]
    NoTopMerge,
    #[error("NotNested: partition {index} does not refine partition {next}", next = index + 1)]
    NotNested { index: usize },
    #[error("InconsistentReplay: {0}")]
    InconsistentReplay(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Canonical dendrogram: `breakpoints[0] == 0`, strictly increasing, and the
/// partition changes at every breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    labels: Vec<String>,
    breakpoints: Vec<f64>,
    partitions: Vec<Partition>,
}

impl Dendrogram {
    /// Validates labeled partitions against the four dendrogram axioms and
    /// drops breakpoints where nothing changes.
    pub fn validate<S: AsRef<str>>(
        labels: Vec<String>,
        breakpoints: Vec<f64>,
        partitions: &[Vec<Vec<S>>],
    ) -> Result<Self, DendrogramError> {
        let index = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| MetricError::UnknownLabel(l.to_string()))
        };
        let parts = partitions
            .iter()
            .map(|p| {
                let blocks = p
                    .iter()
                    .map(|b| b.iter().map(|l| index(l.as_ref())).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                Partition::from_blocks(blocks, labels.len())
            })
            .collect::<Result<Vec<_>, MetricError>>()?;
        Self::from_partitions(labels, breakpoints, parts)
    }

    pub fn from_partitions(
        labels: Vec<String>,
        breakpoints: Vec<f64>,
        partitions: Vec<Partition>,
    ) -> Result<Self, DendrogramError> {
        if breakpoints.len() != partitions.len() {
            return Err(DendrogramError::LengthMismatch {
                breakpoints: breakpoints.len(),
                partitions: partitions.len(),
            });
        }
        if labels.is_empty() {
            return Err(MetricError::EmptyInput.into());
        }
        let n = labels.len();
        for (i, w) in breakpoints.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(DendrogramError::UnsortedBreakpoints { index: i + 1 });
            }
        }
        if breakpoints.first() != Some(&0.0) || partitions[0] != Partition::singletons(n) {
            return Err(DendrogramError::NotSingletonsAtZero);
        }
        if partitions.last().map(Partition::len) != Some(1) {
            return Err(DendrogramError::NoTopMerge);
        }
        for (i, w) in partitions.windows(2).enumerate() {
            if !w[0].refines(&w[1]) {
                return Err(DendrogramError::NotNested { index: i });
            }
        }
        let mut bp = vec![breakpoints[0]];
        let mut parts = vec![partitions[0].clone()];
        for (t, p) in breakpoints.into_iter().zip(partitions).skip(1) {
            if parts.last() != Some(&p) {
                bp.push(t);
                parts.push(p);
            }
        }
        Ok(Self {
            labels,
            breakpoints: bp,
            partitions: parts,
        })
    }

    /// Builds from a sequence that is already nested and starts at singletons.
    pub(crate) fn from_levels_unchecked(
        labels: Vec<String>,
        breakpoints: Vec<f64>,
        partitions: Vec<Partition>,
    ) -> Self {
        Self::from_partitions(labels, breakpoints, partitions)
            .expect("clustering runs produce valid dendrograms")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Height of the final merge.
    pub fn top(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Partition at the largest breakpoint `<= t`.
    pub fn partition_at(&self, t: f64) -> &Partition {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        &self.partitions[i.max(1) - 1]
    }

    /// Breakpoints compared within an absolute tolerance; partitions exactly.
    pub fn approx_eq(&self, other: &Dendrogram, tol: f64) -> bool {
        self.labels == other.labels
            && self.partitions == other.partitions
            && self
                .breakpoints
                .iter()
                .zip(&other.breakpoints)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// The ultrametric `u(x, y) = min { r : x, y share a block of θ(r) }`.
    pub fn eta(&self) -> Ultrametric {
        let n = self.len();
        let mut dist = vec![0.0; n * n];
        let mut prev = self.partitions[0].assignment();
        for (t, p) in self.breakpoints.iter().zip(&self.partitions).skip(1) {
            let cur = p.assignment();
            for block in p.blocks() {
                for (a, &x) in block.iter().enumerate() {
                    for &y in &block[a + 1..] {
                        if prev[x] != prev[y] {
                            dist[x * n + y] = *t;
                            dist[y * n + x] = *t;
                        }
                    }
                }
            }
            prev = cur;
        }
        Ultrametric::new_unchecked(FiniteMetricSpace::from_parts(self.labels.clone(), dist))
    }

    /// Inverse of [`Dendrogram::eta`]: breakpoints are the distance set, the
    /// partition at `t` is the set of `t`-components.
    pub fn from_ultrametric(u: &Ultrametric) -> Self {
        let bp = u.distance_set().values().to_vec();
        let parts = bp.iter().map(|&t| u.t_components(t)).collect();
        Self::from_levels_unchecked(u.labels().to_vec(), bp, parts)
    }

    /// Flattens the dendrogram into pairwise merge events. A multi-way merge
    /// becomes one row per absorbed child, all at the same height.
    pub fn to_merge_table(&self) -> MergeTable {
        let mut rows = Vec::new();
        for (i, (t, p)) in self.breakpoints.iter().zip(&self.partitions).enumerate().skip(1) {
            let prev = &self.partitions[i - 1];
            for block in p.blocks() {
                let children = children_of(prev, block);
                if children.len() < 2 {
                    continue;
                }
                let mut acc: Vec<usize> = children[0].clone();
                for child in &children[1..] {
                    let mut a = acc.clone();
                    a.sort_unstable();
                    rows.push(MergeRow {
                        a: a.iter().map(|&i| self.labels[i].clone()).collect(),
                        b: child.iter().map(|&i| self.labels[i].clone()).collect(),
                        height: *t,
                        size: acc.len() + child.len(),
                    });
                    acc.extend_from_slice(child);
                }
            }
        }
        MergeTable {
            labels: self.labels.clone(),
            rows,
        }
    }

    /// Replays merge rows from singletons.
    pub fn from_merge_table(table: &MergeTable) -> Result<Self, DendrogramError> {
        let labels = table.labels.clone();
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::EmptyInput.into());
        }
        let index = |l: &String| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| DendrogramError::InconsistentReplay(format!("unknown label {l:?}")))
        };
        let mut blocks: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut breakpoints = vec![0.0];
        let mut partitions = vec![Partition::singletons(n)];
        let mut current_height: Option<f64> = None;
        for row in &table.rows {
            if !(row.height > 0.0) || !row.height.is_finite() {
                return Err(DendrogramError::InconsistentReplay(format!(
                    "merge height {} must be positive",
                    row.height
                )));
            }
            if let Some(h) = current_height {
                if row.height < h {
                    return Err(DendrogramError::InconsistentReplay(
                        "merge heights decrease".into(),
                    ));
                }
                if row.height > h {
                    breakpoints.push(h);
                    partitions.push(Partition::canonical(blocks.clone()));
                }
            }
            current_height = Some(row.height);
            let mut a = row.a.iter().map(index).collect::<Result<Vec<_>, _>>()?;
            let mut b = row.b.iter().map(index).collect::<Result<Vec<_>, _>>()?;
            a.sort_unstable();
            b.sort_unstable();
            let ia = blocks.iter().position(|x| x == &a);
            let ib = blocks.iter().position(|x| x == &b);
            let (Some(ia), Some(ib)) = (ia, ib) else {
                return Err(DendrogramError::InconsistentReplay(format!(
                    "row at height {} does not merge two current blocks",
                    row.height
                )));
            };
            if ia == ib {
                return Err(DendrogramError::InconsistentReplay(
                    "row merges a block with itself".into(),
                ));
            }
            if row.size != a.len() + b.len() {
                return Err(DendrogramError::InconsistentReplay(format!(
                    "row at height {} reports size {} but merges {} points",
                    row.height,
                    row.size,
                    a.len() + b.len()
                )));
            }
            let (lo, hi) = (ia.min(ib), ia.max(ib));
            let removed = blocks.swap_remove(hi);
            blocks[lo].extend(removed);
            blocks[lo].sort_unstable();
        }
        if let Some(h) = current_height {
            breakpoints.push(h);
            partitions.push(Partition::canonical(blocks));
        }
        Self::from_partitions(labels, breakpoints, partitions)
            .map_err(|e| DendrogramError::InconsistentReplay(e.to_string()))
    }

    /// Newick string: leaves at height 0, branch length = parent height minus
    /// child height, multi-way merges as multifurcating nodes.
    pub fn to_newick(&self) -> String {
        let top = self.partitions.len() - 1;
        let mut out = String::new();
        if self.len() == 1 {
            out.push_str(&newick_label(&self.labels[0]));
        } else {
            self.write_newick_node(&mut out, &self.partitions[top].blocks()[0], top);
        }
        out.push(';');
        out
    }

    fn write_newick_node(&self, out: &mut String, block: &[usize], level: usize) {
        if level == 0 {
            out.push_str(&newick_label(&self.labels[block[0]]));
            return;
        }
        let height = self.breakpoints[level];
        let prev = &self.partitions[level - 1];
        out.push('(');
        for (k, child) in children_of(prev, block).iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let child_level = self.formed_at(child, level - 1);
            self.write_newick_node(out, child, child_level);
            out.push(':');
            out.push_str(&(height - self.breakpoints[child_level]).to_string());
        }
        out.push(')');
    }

    /// Earliest level at or below `level` where `block` is already a block.
    fn formed_at(&self, block: &[usize], level: usize) -> usize {
        let mut l = level;
        while l > 0 && self.partitions[l - 1].blocks().iter().any(|b| b == block) {
            l -= 1;
        }
        l
    }

    pub fn to_json(&self) -> DendrogramJson {
        DendrogramJson {
            labels: self.labels.clone(),
            breakpoints: self.breakpoints.clone(),
            partitions: self.partitions.iter().map(|p| p.to_labels(&self.labels)).collect(),
        }
    }

    pub fn from_json(json: &DendrogramJson) -> Result<Self, DendrogramError> {
        Self::validate(json.labels.clone(), json.breakpoints.clone(), &json.partitions)
    }

    /// Plot-ready rows `(height, block index, members)` at every breakpoint.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("height,block,members\n");
        for (t, p) in self.breakpoints.iter().zip(&self.partitions) {
            for (k, b) in p.to_labels(&self.labels).iter().enumerate() {
                out.push_str(&format!("{t},{k},{}\n", csv_field(&b.join(";"))));
            }
        }
        out
    }
}

/// Blocks of `finer` contained in `block`, in canonical order.
fn children_of(finer: &Partition, block: &[usize]) -> Vec<Vec<usize>> {
    finer
        .blocks()
        .iter()
        .filter(|b| block.binary_search(&b[0]).is_ok())
        .cloned()
        .collect()
}

fn newick_label(l: &str) -> String {
    if l.chars().any(|c| "()[]':;,".contains(c) || c.is_whitespace()) {
        format!("'{}'", l.replace('\'', "''"))
    } else {
        l.to_string()
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Wire format `{"labels": [...], "breakpoints": [...], "partitions": [[[...]]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DendrogramJson {
    pub labels: Vec<String>,
    pub breakpoints: Vec<f64>,
    pub partitions: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRow {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeTable {
    pub labels: Vec<String>,
    pub rows: Vec<MergeRow>,
}

impl MergeTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("block_a,block_b,height,size\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&r.a.join(";")),
                csv_field(&r.b.join(";")),
                r.height,
                r.size
            ));
        }
        out
    }
}
