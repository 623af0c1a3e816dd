//! Classical-sampling estimators of weighted sums of expectation values.
//!
//! Every estimator takes a [`Problem`], a shot budget and an [`RngStream`],
//! and returns an [`EstimateReport`]. `Shots::Exact` switches to the
//! infinite-shot path, which evaluates the Born distribution densely and is
//! the oracle for the finite-shot paths.

mod bounds;
mod dqc1;
mod lcu;
mod poisson_binomial;
mod problem;
mod sa_lcu;
mod se;
mod signed;
mod weights;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::sampling::sample_indices;
use crate::qcore::RngStream;

pub use bounds::{covariance_bound_check, lcu_total_shots, se_total_shots, variance_ordering, CovarianceBound, VarianceOrdering};
pub use dqc1::{dqc1_trace, hadamard_test_circuit, Dqc1Mode, TracePart};
pub use lcu::{dressed_readout, lcu_estimate, lcu_joint_probabilities, Dressing, DressedReadout, RegisterEntry};
pub use poisson_binomial::{binomial_approx, binomial_variance_gap, poisson_binomial_pmf, PoissonBinomial};
pub use problem::{Problem, Term};
pub use sa_lcu::sa_lcu_estimate;
pub use se::se_estimate;
pub use signed::{lcu_signed_biased, lcu_signed_unbiased, BiasedEstimate};
pub use weights::LcuWeights;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimatorKind {
    Se,
    Lcu,
    LcuSignedBiased,
    LcuSignedUnbiased,
    SaLcu,
    Dqc1Mixed,
    Dqc1Basis,
}

impl EstimatorKind {
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Se => "SE",
            EstimatorKind::Lcu => "LCU",
            EstimatorKind::LcuSignedBiased => "LCU_SIGNED_BIASED",
            EstimatorKind::LcuSignedUnbiased => "LCU_SIGNED_UNBIASED",
            EstimatorKind::SaLcu => "SA_LCU",
            EstimatorKind::Dqc1Mixed => "DQC1_MIXED",
            EstimatorKind::Dqc1Basis => "DQC1_BASIS",
        }
    }
}

/// Shot budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shots {
    /// Infinite-shot limit: the mean is exact and the reported analytic
    /// variance is that of a single shot.
    Exact,
    /// Same budget for the circuit (or for every circuit, for SE).
    Finite(usize),
    /// One budget per term; SE only.
    PerTerm(Vec<usize>),
}

impl Shots {
    pub fn is_exact(&self) -> bool {
        matches!(self, Shots::Exact)
    }

    /// Single budget for estimators that run one circuit, `None` in exact mode.
    pub(crate) fn single(&self) -> Result<Option<usize>> {
        match self {
            Shots::Exact => Ok(None),
            Shots::Finite(0) => Err(Error::InvalidInput("shots must be ≥ 1".into())),
            Shots::Finite(n) => Ok(Some(*n)),
            Shots::PerTerm(_) => Err(Error::InvalidInput("per-term budgets only apply to SE".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mean: f64,
    pub analytic_variance: f64,
    pub empirical_variance: f64,
    pub shots_total: u64,
    pub circuits_used: usize,
    pub seed: u64,
    pub estimator_kind: EstimatorKind,
    /// Magnitude of the bias removed by de-biasing, where one exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<f64>,
    /// Variance contributed by the random choice of unitary alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary_variance: Option<f64>,
}

impl EstimateReport {
    pub(crate) fn new(kind: EstimatorKind, seed: u64) -> Self {
        Self {
            mean: 0.0,
            analytic_variance: 0.0,
            empirical_variance: 0.0,
            shots_total: 0,
            circuits_used: 0,
            seed,
            estimator_kind: kind,
            bias: None,
            unitary_variance: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// `estimator,L,n_s,mean,analytic_var,empirical_var,seed`.
    pub const CSV_HEADER: &'static str = "estimator,L,n_s,mean,analytic_var,empirical_var,seed";

    pub fn csv_row(&self, l: usize, n_s: u64) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.estimator_kind.label(),
            l,
            n_s,
            self.mean,
            self.analytic_variance,
            self.empirical_variance,
            self.seed
        )
    }
}

/// Running sums of shot values.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }
}

/// Draws `shots` outcomes from `probs` and accumulates `value(outcome)`.
pub(crate) fn sample_moments(probs: &[f64], shots: usize, stream: &RngStream, value: impl Fn(usize) -> f64) -> Result<Moments> {
    let mut rng = stream.rng();
    let mut m = Moments::default();
    for x in sample_indices(probs, shots, &mut rng)? {
        m.push(value(x));
    }
    Ok(m)
}
