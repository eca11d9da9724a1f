//! Checks of the structural hypotheses behind the instability results.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::axioms::{axiom_harness, AxiomCheck};
use crate::gh::gh_upper_from;
use crate::lab::constructions::prop_bridge_space;
use crate::lab::paths::PathSpec;
use crate::lab::random::{random_metric_with, random_split, rng};
use crate::lab::LabError;
use crate::linkage::Linkage;
use crate::metric::{interval_space, FiniteMetricSpace};
use crate::method::MethodSpec;
use crate::unchaining::{Condition, Unchaining};

/// The bridge `(b1, b2, R)` when the two `t`-components are joined by a
/// unique shortest cross pair; `None` when the shortest cross distance is
/// tied.
pub fn bridged_by_single_edge(
    space: &FiniteMetricSpace,
    t: f64,
    b1: &[usize],
    b2: &[usize],
) -> Result<Option<(usize, usize, f64)>, LabError> {
    if b1.is_empty() || b2.is_empty() || !space.is_t_connected(b1, t) || !space.is_t_connected(b2, t) {
        return Err(LabError::NotTComponents);
    }
    let mut best: Option<(usize, usize, f64)> = None;
    let mut tied = false;
    for &x in b1 {
        for &y in b2 {
            let d = space.d(x, y);
            if d <= t {
                return Err(LabError::NotTComponents);
            }
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
    Ok(if tied { None } else { best })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRegularityReport {
    pub linkage: String,
    pub r: f64,
    pub samples: Vec<(f64, f64)>,
    /// All sampled values agree to a relative 1e-12.
    pub constant: bool,
    /// All sampled values equal `R` to a relative 1e-12.
    pub equals_r: bool,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Evaluates the linkage between the path's blocks at `t = i / samples`.
pub fn gamma_regularity_check(linkage: &dyn Linkage, path: &PathSpec, samples: usize) -> Result<GammaRegularityReport, LabError> {
    let (b1, b2) = path.blocks();
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples.max(1) {
        let t = i as f64 / samples.max(1) as f64;
        let m = path.at(t)?;
        values.push((t, linkage.evaluate(b1, b2, &m)));
    }
    let first = values[0].1;
    Ok(GammaRegularityReport {
        linkage: linkage.name().to_string(),
        r: path.r(),
        constant: values.iter().all(|v| close(v.1, first)),
        equals_r: values.iter().all(|v| close(v.1, path.r())),
        samples: values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityStep {
    pub s1: f64,
    pub s2: f64,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub steps: Vec<ContinuityStep>,
    pub passed: bool,
}

/// Upper bound on the distance between consecutive grid points against
/// `(s2 - s1) * (diam + R + 2 delta) / 2`.
pub fn path_continuity_check(path: &PathSpec, grid: usize) -> Result<ContinuityReport, LabError> {
    let grid = grid.max(2);
    let ts: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    let spaces = ts.iter().map(|&t| path.at(t)).collect::<Result<Vec<_>, _>>()?;
    let c = path.step_constant();
    let mut steps = Vec::with_capacity(grid - 1);
    for k in 0..grid - 1 {
        let tau = path.correspondence(ts[k], &spaces[k], ts[k + 1], &spaces[k + 1])?;
        let gap = gh_upper_from(&tau, &spaces[k], &spaces[k + 1]);
        let bound = (ts[k + 1] - ts[k]) * c / 2.0;
        steps.push(ContinuityStep {
            s1: ts[k],
            s2: ts[k + 1],
            gap,
            bound,
        });
    }
    let passed = steps.iter().all(|s| s.gap <= s.bound * (1.0 + 1e-12));
    Ok(ContinuityReport { steps, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub method: MethodSpec,
    /// Linkage constant and equal to `R` along random Gamma paths.
    pub gamma_regular: bool,
    pub scale_preserving: AxiomCheck,
    /// The condition rejects the bridge pair of the bridge space at `R = 2`
    /// although the pair is split at level 1.
    pub nontrivial: bool,
    /// The method returns `I(R)` unchanged.
    pub fixes_two_points: bool,
    /// Outputs on `I(delta, R)` and `I(delta, R, delta)` match single linkage.
    pub ordinary: bool,
    pub admissible: bool,
}

/// Runs the admissibility checks for `method` on `trials` random instances.
pub fn admissibility_harness(method: &MethodSpec, trials: usize, seed: u64) -> Result<AdmissibilityReport, LabError> {
    let linkage = method.linkage();
    let mut r = rng(seed);
    let mut gamma_regular = true;
    for _ in 0..trials {
        let n = r.gen_range(2..=7);
        let base = random_metric_with(n, &mut r);
        let (b1, b2) = random_split(n, &mut r);
        let target = linkage.evaluate(&b1, &b2, &base);
        let path = PathSpec::gamma(base, b1, b2, target)?;
        let report = gamma_regularity_check(&linkage, &path, 16)?;
        gamma_regular &= report.constant && report.equals_r;
    }
    let scale_preserving = axiom_harness(&linkage, trials, seed).scale_preservation;

    let nontrivial = match method.condition() {
        Some(Condition::PAlpha(p)) => {
            let alpha = p.alpha().ceil() as usize;
            let (space, b1, b2) = prop_bridge_space(alpha, 0.5)?;
            let (d, _) = method.run(&space)?;
            let split = d.partition_at(1.0).len() == 2;
            split && !p.satisfied(&b1, &b2, 2.0, &space)?
        }
        Some(Condition::Always) | None => false,
    };

    let mut fixes_two_points = true;
    let mut ordinary = true;
    let sl = MethodSpec::Standard(crate::linkage::BuiltinLinkage::Sl);
    for (delta, big) in [(0.25, 1.0), (1.0, 1.0), (0.5, 3.0), (2.0, 0.5)] {
        let two = interval_space(&[big])?;
        fixes_two_points &= method.run(&two)?.0.eta().into_space() == two;
        for lengths in [vec![delta, big], vec![delta, big, delta]] {
            let x = interval_space(&lengths)?;
            ordinary &= method.run(&x)?.0 == sl.run(&x)?.0;
        }
    }
    Ok(AdmissibilityReport {
        method: *method,
        admissible: gamma_regular && scale_preserving.passed && nontrivial && fixes_two_points,
        gamma_regular,
        scale_preserving,
        nontrivial,
        fixes_two_points,
        ordinary,
    })
}
