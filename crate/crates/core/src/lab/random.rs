//! Reproducible random spaces.
//!
//! Coordinates and heights are dyadic rationals with few significant bits,
//! so sums and differences are exact in `f64` and validation never sees
//! rounding noise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dendrogram::Dendrogram;
use crate::metric::{FiniteMetricSpace, Partition, Ultrametric};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic seed for a sub-task, independent of execution order.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// `n` distinct points in `[0, 16)^3` under the L1 norm.
pub fn random_metric(n: usize, seed: u64) -> FiniteMetricSpace {
    random_metric_with(n, &mut rng(seed))
}

pub fn random_metric_with(n: usize, rng: &mut impl Rng) -> FiniteMetricSpace {
    const SCALE: f64 = 1.0 / 65536.0;
    let mut points: Vec<[u32; 3]> = Vec::with_capacity(n);
    while points.len() < n {
        let p = [rng.gen_range(0..1 << 20), rng.gen_range(0..1 << 20), rng.gen_range(0..1 << 20)];
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let mut dist = Vec::with_capacity(n * n);
    for p in &points {
        for q in &points {
            let l1: u64 = p.iter().zip(q).map(|(a, b)| u64::from(a.abs_diff(*b))).sum();
            dist.push(l1 as f64 * SCALE);
        }
    }
    FiniteMetricSpace::from_parts(labels("x", n), dist)
}

/// A random dendrogram on `n` points with at most `depth` distinct merge
/// heights, turned into its ultrametric. Consecutive heights differ by a
/// multiple of 1/4 between 1/4 and 2.
pub fn random_ultrametric(n: usize, depth: usize, seed: u64) -> Ultrametric {
    random_dendrogram_with(n, depth, &mut rng(seed)).eta()
}

pub fn random_dendrogram_with(n: usize, depth: usize, rng: &mut impl Rng) -> Dendrogram {
    let labels = labels("u", n.max(1));
    let n = labels.len();
    let depth = depth.max(1);
    let merges = n - 1;
    let mut level_of: Vec<usize> = (0..merges).map(|_| rng.gen_range(0..depth)).collect();
    level_of.sort_unstable();
    let mut blocks: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut breakpoints = vec![0.0];
    let mut partitions = vec![Partition::singletons(n)];
    let mut height = 0.0;
    let mut k = 0;
    for level in 0..depth {
        let count = level_of[k..].iter().take_while(|&&l| l == level).count();
        if count == 0 {
            continue;
        }
        for _ in 0..count {
            blocks.shuffle(rng);
            let a = blocks.pop().expect("at least two blocks");
            blocks.last_mut().expect("at least two blocks").extend(a);
        }
        k += count;
        height += f64::from(rng.gen_range(1..=8u32)) / 4.0;
        breakpoints.push(height);
        partitions.push(Partition::canonical(blocks.clone()));
    }
    Dendrogram::from_partitions(labels, breakpoints, partitions).expect("random merges are nested")
}

/// Two nonempty disjoint blocks drawn from `0..n` (`n >= 2`).
pub fn random_blocks(n: usize, rng: &mut impl Rng) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let a = rng.gen_range(1..n);
    let b = rng.gen_range(1..=n - a);
    let mut first = idx[..a].to_vec();
    let mut second = idx[a..a + b].to_vec();
    first.sort_unstable();
    second.sort_unstable();
    (first, second)
}

/// A random nontrivial split of `0..n` (`n >= 2`).
pub fn random_split(n: usize, rng: &mut impl Rng) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let a = rng.gen_range(1..n);
    let mut first = idx[..a].to_vec();
    let mut second = idx[a..].to_vec();
    first.sort_unstable();
    second.sort_unstable();
    (first, second)
}
