use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qcore::sampling::{loglog_slope, median};
use crate::qcore::RngStream;

use super::{canonical_ae_bound, mlqae_estimate, AeProblem, QuerySchedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingModel {
    /// Bernoulli sampling with no Grover iterations.
    Classical,
    /// `m ∈ {0, 1, 2, 4, …}` with equal shots per level.
    Exponential,
}

impl ScalingModel {
    pub fn label(self) -> &'static str {
        match self {
            ScalingModel::Classical => "classical",
            ScalingModel::Exponential => "exponential",
        }
    }
}

/// Error-versus-queries study for one amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub p: f64,
    /// Level counts of the exponential schedules; one `n_q` point each.
    pub levels: Vec<usize>,
    pub shots_per_level: u64,
    /// Query budgets of the classical points.
    pub classical_queries: Vec<u64>,
    pub seeds: u64,
    pub base_seed: u64,
}

impl Default for ScalingConfig {
    /// Exponential schedules with 4 to 11 levels span `n_q` from 90 to 10285 at
    /// 5 shots per level; the classical points are 24 log-spaced budgets in
    /// `[10², 10⁴]`. Fewer shots per level put more of the budget on long
    /// Grover powers, which lowers the error constant relative to the bound.
    fn default() -> Self {
        let classical_queries = (0..24).map(|j| (100.0 * 100f64.powf(j as f64 / 23.0)).round() as u64).collect();
        Self { p: 0.3, levels: (4..=11).collect(), shots_per_level: 5, classical_queries, seeds: 20, base_seed: 2024 }
    }
}

impl ScalingConfig {
    pub fn schedules(&self, model: ScalingModel) -> Result<Vec<QuerySchedule>> {
        match model {
            ScalingModel::Exponential => self.levels.iter().map(|&l| QuerySchedule::exponential(l, self.shots_per_level)).collect(),
            ScalingModel::Classical => self.classical_queries.iter().map(|&n| QuerySchedule::classical(n)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub model: ScalingModel,
    pub n_q: u64,
    pub abs_error: f64,
    pub seed: u64,
}

impl ScalingRow {
    pub const CSV_HEADER: &'static str = "model,n_q,abs_error,seed";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.model.label(), self.n_q, self.abs_error, self.seed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingSummary {
    pub model: ScalingModel,
    pub n_q: Vec<u64>,
    pub median_error: Vec<f64>,
    /// Slope of `ln(median error)` against `ln n_q`.
    pub slope: f64,
    /// Fraction of points whose median error is within the canonical bound at `k = 1`.
    pub bound_fraction: f64,
}

/// Runs every (point, seed) pair; seeds are `base_seed + s` and each point
/// draws from its own stream, so rows do not depend on thread count.
pub fn scaling_rows(config: &ScalingConfig, model: ScalingModel) -> Result<Vec<ScalingRow>> {
    let schedules = config.schedules(model)?;
    if schedules.is_empty() || config.seeds == 0 {
        return invalid("scaling study needs at least one point and one seed");
    }
    let problem = AeProblem::new(config.p)?;
    let stream_base = match model {
        ScalingModel::Classical => 0,
        ScalingModel::Exponential => 1 << 32,
    };
    let jobs: Vec<(usize, u64)> = (0..schedules.len()).flat_map(|i| (0..config.seeds).map(move |s| (i, s))).collect();
    jobs.into_par_iter()
        .map(|(i, s)| {
            let seed = config.base_seed + s;
            let stream = RngStream::new(seed, stream_base + i as u64);
            let fit = mlqae_estimate(&problem, &schedules[i], &stream, false)?;
            Ok(ScalingRow { model, n_q: fit.n_q, abs_error: (fit.p_hat - config.p).abs(), seed })
        })
        .collect()
}

/// Per-point medians, the fitted slope and the bound fraction.
pub fn summarize(config: &ScalingConfig, model: ScalingModel, rows: &[ScalingRow]) -> Result<ScalingSummary> {
    let mut n_q: Vec<u64> = rows.iter().filter(|r| r.model == model).map(|r| r.n_q).collect();
    n_q.sort_unstable();
    n_q.dedup();
    let median_error: Vec<f64> = n_q
        .iter()
        .map(|&n| median(&rows.iter().filter(|r| r.model == model && r.n_q == n).map(|r| r.abs_error).collect::<Vec<_>>()))
        .collect();
    // A zero median (exact hit) would break the log fit; floor it at machine precision.
    let floored: Vec<f64> = median_error.iter().map(|e| e.max(f64::EPSILON)).collect();
    let xs: Vec<f64> = n_q.iter().map(|&n| n as f64).collect();
    let slope = loglog_slope(&xs, &floored)?;
    let within = n_q.iter().zip(&median_error).filter(|(n, e)| **e <= canonical_ae_bound(config.p, **n as f64, 1.0)).count();
    Ok(ScalingSummary { model, bound_fraction: within as f64 / n_q.len() as f64, n_q, median_error, slope })
}
