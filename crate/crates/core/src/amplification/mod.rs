//! Amplitude-estimation query models.
//!
//! AE is simulated at the likelihood level: after `m` Grover iterations the
//! good outcome has probability `sin²((2m+1)θ_p)` with `sin²θ_p = p`. One shot
//! of `𝒬^m` costs `2m + 1` oracle queries. [`grover`] builds the dense
//! operator `𝒬 = −𝒱 S₀ 𝒱† S_χ` for small dimensions as a cross-check.

mod allocation;
pub mod grover;
mod mlqae;
mod scaling;

use std::f64::consts::PI;

use crate::error::{invalid, Result};

pub use allocation::{amplified_lcu_variance, optimal_shot_allocation, queries_for_precision, sa_lcu_amplified_variance, ShotAllocation, SaAmplifiedVariance};
pub use mlqae::{mlqae_estimate, MlqaeFit, QuerySchedule, GRID_POINTS, REFINE_STEPS};
pub use scaling::{scaling_rows, summarize, ScalingConfig, ScalingModel, ScalingRow, ScalingSummary};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AeProblem {
    p: f64,
    theta: f64,
}

impl AeProblem {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return invalid("p must lie in [0, 1]");
        }
        Ok(Self { p, theta: p.sqrt().asin() })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `θ_p = arcsin(√p) ∈ [0, π/2]`.
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// `sin²((2m+1)θ_p)`.
pub fn grover_outcome_prob(problem: &AeProblem, m: u64) -> f64 {
    ((2 * m + 1) as f64 * problem.theta).sin().powi(2)
}

/// `2πk√(p(1−p))/n_q + π²k²/n_q²`.
pub fn canonical_ae_bound(p: f64, n_q: f64, k: f64) -> f64 {
    2.0 * PI * k * (p * (1.0 - p)).max(0.0).sqrt() / n_q + (PI * k / n_q).powi(2)
}

/// `ψ⁽¹⁾(x) = Σ_{s≥0} 1/(x+s)²` by upward recurrence and the asymptotic series.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    acc + r + 0.5 * r2 + r * r2 * (1.0 / 6.0 - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 / 30.0)))
}

/// Success probability of canonical AE at error multiplier `k`: exactly
/// `8/π²` for `k = 1`, otherwise the lower bound `1 − ψ⁽¹⁾(k)/2`.
pub fn success_probability(k: u32) -> f64 {
    match k {
        0 => 0.0,
        1 => 8.0 / (PI * PI),
        _ => 1.0 - 0.5 * trigamma(f64::from(k)),
    }
}

/// The weaker closed form `1 − 1/(2(k − 1))`, valid for `k > 1`.
pub fn success_probability_simple(k: u32) -> f64 {
    if k <= 1 {
        return 0.0;
    }
    1.0 - 1.0 / (2.0 * f64::from(k - 1))
}
