use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qcore::RngStream;

use super::{grover_outcome_prob, AeProblem};

pub const GRID_POINTS: usize = 16384;
pub const REFINE_STEPS: usize = 30;

/// Grover powers `m_j` with shot counts `N_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySchedule {
    pub levels: Vec<(u64, u64)>,
}

impl QuerySchedule {
    pub fn new(levels: Vec<(u64, u64)>) -> Result<Self> {
        if levels.is_empty() || levels.iter().all(|l| l.1 == 0) {
            return invalid("schedule needs at least one level with shots");
        }
        Ok(Self { levels })
    }

    /// Classical sampling: `shots` draws with no amplification.
    pub fn classical(shots: u64) -> Result<Self> {
        Self::new(vec![(0, shots)])
    }

    /// `m ∈ {0, 1, 2, 4, …, 2^{M−2}}` with `shots` per level.
    pub fn exponential(levels: usize, shots: u64) -> Result<Self> {
        if levels == 0 {
            return invalid("need at least one level");
        }
        let ms = std::iter::once(0).chain((0..levels - 1).map(|j| 1u64 << j));
        Self::new(ms.map(|m| (m, shots)).collect())
    }

    /// `Σ N_j (2m_j + 1)`.
    pub fn total_queries(&self) -> u64 {
        self.levels.iter().map(|&(m, n)| n * (2 * m + 1)).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlqaeFit {
    pub p_hat: f64,
    pub theta_hat: f64,
    pub n_q: u64,
    /// Log-likelihood on the uniform θ grid over `[0, π/2]`.
    pub log_likelihood: Vec<f64>,
}

fn log_likelihood(theta: f64, data: &[(u64, f64, f64)]) -> f64 {
    data.iter()
        .map(|&(m, hits, shots)| {
            let a = (2 * m + 1) as f64 * theta;
            let (s2, c2) = (a.sin().powi(2), a.cos().powi(2));
            let mut ll = 0.0;
            if hits > 0.0 {
                ll += hits * s2.ln();
            }
            if shots - hits > 0.0 {
                ll += (shots - hits) * c2.ln();
            }
            ll
        })
        .sum()
}

/// Maximum-likelihood amplitude estimate.
///
/// Draws Bernoulli outcomes with probability `sin²((2m+1)θ_p)` for every shot
/// of every level (or, with `exact`, uses the expected hit counts), then
/// maximizes the likelihood over a 16384-point grid on `[0, π/2]` followed by
/// 30 golden-section steps around the best grid point. All-identical outcomes
/// put the maximum on the boundary, which the grid contains.
pub fn mlqae_estimate(problem: &AeProblem, schedule: &QuerySchedule, stream: &RngStream, exact: bool) -> Result<MlqaeFit> {
    let mut rng = stream.rng();
    let data: Vec<(u64, f64, f64)> = schedule
        .levels
        .iter()
        .filter(|l| l.1 > 0)
        .map(|&(m, n)| {
            let q = grover_outcome_prob(problem, m);
            let hits = if exact { q * n as f64 } else { (0..n).filter(|_| rng.gen::<f64>() < q).count() as f64 };
            (m, hits, n as f64)
        })
        .collect();
    let step = FRAC_PI_2 / (GRID_POINTS - 1) as f64;
    let curve: Vec<f64> = (0..GRID_POINTS).map(|j| log_likelihood(j as f64 * step, &data)).collect();
    let best = (0..GRID_POINTS).fold(0, |b, j| if curve[j] > curve[b] { j } else { b });
    let (mut lo, mut hi) = ((best as f64 - 1.0).max(0.0) * step, ((best + 1) as f64 * step).min(FRAC_PI_2));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut f1, mut f2) = (log_likelihood(x1, &data), log_likelihood(x2, &data));
    for _ in 0..REFINE_STEPS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = log_likelihood(x2, &data);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = log_likelihood(x1, &data);
        }
    }
    let mid = 0.5 * (lo + hi);
    let grid_theta = best as f64 * step;
    let theta_hat = if log_likelihood(mid, &data) >= curve[best] { mid } else { grid_theta };
    Ok(MlqaeFit { p_hat: theta_hat.sin().powi(2), theta_hat, n_q: schedule.total_queries(), log_likelihood: curve })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_and_costs() {
        let s = QuerySchedule::exponential(4, 10).unwrap();
        assert_eq!(s.levels, vec![(0, 10), (1, 10), (2, 10), (4, 10)]);
        assert_eq!(s.total_queries(), 10 * (1 + 3 + 5 + 9));
        assert_eq!(QuerySchedule::classical(7).unwrap().total_queries(), 7);
        assert!(QuerySchedule::new(vec![(3, 0)]).is_err());
    }

    #[test]
    fn exact_counts_recover_p() {
        for p in [0.3, 0.05, 0.8] {
            let prob = AeProblem::new(p).unwrap();
            let fit = mlqae_estimate(&prob, &QuerySchedule::exponential(6, 20).unwrap(), &RngStream::new(0, 0), true).unwrap();
            assert!((fit.p_hat - p).abs() < 1e-8, "{p}: {}", fit.p_hat);
            assert_eq!(fit.log_likelihood.len(), GRID_POINTS);
        }
    }

    #[test]
    fn degenerate_outcomes_hit_the_boundary() {
        for (p, edge) in [(0.0, 0.0), (1.0, 1.0)] {
            let prob = AeProblem::new(p).unwrap();
            let fit = mlqae_estimate(&prob, &QuerySchedule::classical(50).unwrap(), &RngStream::new(1, 0), false).unwrap();
            assert!((fit.p_hat - edge).abs() < 1e-9);
        }
    }

    #[test]
    fn classical_limit_is_the_bernoulli_mle() {
        let prob = AeProblem::new(0.3).unwrap();
        let stream = RngStream::new(2, 0);
        let fit = mlqae_estimate(&prob, &QuerySchedule::classical(1000).unwrap(), &stream, false).unwrap();
        let mut rng = stream.rng();
        let hits = (0..1000).filter(|_| rng.gen::<f64>() < 0.3).count();
        // A flat log-likelihood limits the refined optimum to about √ε_mach in θ.
        assert!((fit.p_hat - hits as f64 / 1000.0).abs() < 1e-7, "{} {}", fit.p_hat, hits);
    }
}
