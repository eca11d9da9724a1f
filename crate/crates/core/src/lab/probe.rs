//! Semi-stability probe: perturb an ultrametric, cluster, and measure how far
//! the output lands from the original.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gh::{gh_exact, gh_lower_bound, gh_upper_from, Correspondence};
use crate::lab::random::{derive_seed, rng};
use crate::lab::scan::EXACT_GH_MAX_POINTS;
use crate::lab::LabError;
use crate::metric::{FiniteMetricSpace, Ultrametric, Validation};
use crate::method::MethodSpec;

const MAX_RETRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Distance between the perturbed input and `U`.
    pub input_gh: f64,
    /// Distance between the clustered output and `U`.
    pub output_gh: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: f64,
    pub max_output_gh: f64,
    pub mean_output_gh: f64,
    pub max_input_gh: f64,
    /// Every distance is exact rather than an upper bound.
    pub exact: bool,
    /// `max_output_gh` is at most the previous level's.
    pub trend_ok: bool,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub method: MethodSpec,
    pub points: usize,
    pub seed: u64,
    pub levels: Vec<LevelReport>,
    pub non_increasing: bool,
}

impl PerturbationReport {
    pub const CSV_HEADER: &'static str = "level,trial,input_gh,output_gh,exact,trend_ok";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for level in &self.levels {
            for t in &level.trials {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    level.level, t.trial, t.input_gh, t.output_gh, t.exact, level.trend_ok
                ));
            }
        }
        out
    }
}

/// Moves every distance by at most `eta / 2`, resampling until the result is
/// a metric.
pub fn perturb(space: &FiniteMetricSpace, eta: f64, rng: &mut impl Rng) -> Result<FiniteMetricSpace, LabError> {
    if eta == 0.0 {
        return Ok(space.clone());
    }
    let n = space.len();
    for _ in 0..MAX_RETRIES {
        let mut rows = space.to_rows();
        for i in 0..n {
            for j in i + 1..n {
                let v = rows[i][j] + rng.gen_range(-eta / 2.0..eta / 2.0);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        if let Ok(m) = FiniteMetricSpace::build(space.labels().to_vec(), rows, &Validation::strict()) {
            return Ok(m);
        }
    }
    Err(LabError::PerturbationFailed { level: eta })
}

fn distance_to(x: &FiniteMetricSpace, u: &Ultrametric, budget: u64) -> (f64, bool) {
    if x.len() <= EXACT_GH_MAX_POINTS {
        let g = gh_exact(x, u, budget);
        if g.exact {
            return (g.value, true);
        }
    }
    let tau = Correspondence::by_label(x, u).expect("same labels");
    let upper = gh_upper_from(&tau, x, u);
    (upper.max(gh_lower_bound(x, u)), false)
}

pub fn semistability_probe(
    u: &Ultrametric,
    method: &MethodSpec,
    levels: &[f64],
    trials: usize,
    seed: u64,
    gh_budget: u64,
) -> Result<PerturbationReport, LabError> {
    if levels.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::LevelsNotDecreasing);
    }
    let gap = u.distance_set().min_gap().unwrap_or(f64::INFINITY);
    if let Some(&level) = levels.iter().find(|&&l| !(l >= 0.0 && l < gap)) {
        return Err(LabError::LevelTooLarge { level, gap });
    }
    let mut reports: Vec<LevelReport> = Vec::with_capacity(levels.len());
    for (li, &level) in levels.iter().enumerate() {
        let records = (0..trials)
            .into_par_iter()
            .map(|trial| -> Result<TrialRecord, LabError> {
                let mut r = rng(derive_seed(seed, li as u64, trial as u64));
                let x = perturb(u, level, &mut r)?;
                let (out, _) = method.run(&x)?;
                let (input_gh, in_exact) = distance_to(&x, u, gh_budget);
                let (output_gh, out_exact) = distance_to(&out.eta(), u, gh_budget);
                Ok(TrialRecord {
                    trial,
                    input_gh,
                    output_gh,
                    exact: in_exact && out_exact,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let max_output_gh = records.iter().map(|t| t.output_gh).fold(0.0, f64::max);
        let mean_output_gh = if records.is_empty() {
            0.0
        } else {
            records.iter().map(|t| t.output_gh).sum::<f64>() / records.len() as f64
        };
        let trend_ok = reports.last().is_none_or(|p| max_output_gh <= p.max_output_gh);
        reports.push(LevelReport {
            level,
            max_output_gh,
            mean_output_gh,
            max_input_gh: records.iter().map(|t| t.input_gh).fold(0.0, f64::max),
            exact: records.iter().all(|t| t.exact),
            trend_ok,
            trials: records,
        });
    }
    Ok(PerturbationReport {
        method: *method,
        points: u.len(),
        seed,
        non_increasing: reports.iter().all(|l| l.trend_ok),
        levels: reports,
    })
}
