use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gradients::{sun_gradient, CostSpec, MultiParamGate};
use crate::qcore::sampling::{haar_unitary, mean_and_variance};
use crate::qcore::RngStream;
use crate::CMatrix;

use super::{expected_remainder_sq, gue_sample, infidelity_prefactor, EnsembleSpec, RemainderKind};

/// Symmetric finite-difference shift of the comparator.
pub const FD_SHIFT: f64 = 0.75;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemainderCost {
    Potq,
    Infidelity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemainderConfig {
    pub n_qubits: usize,
    pub theta: f64,
    pub l_max: usize,
    pub n_draws: usize,
    #[serde(default = "one")]
    pub lambda_a: f64,
    #[serde(default = "one")]
    pub lambda_b: f64,
    #[serde(default = "potq")]
    pub cost: RemainderCost,
    /// Replace `H₁` by `H₀²`, so every commutator vanishes.
    #[serde(default)]
    pub commuting: bool,
}

fn one() -> f64 {
    1.0
}

fn potq() -> RemainderCost {
    RemainderCost::Potq
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderRow {
    pub l: usize,
    pub theta: f64,
    pub d: usize,
    pub emp_mean: f64,
    pub emp_std: f64,
    pub pred_exact: f64,
    pub pred_leading: f64,
    /// Mean squared error of the `δ = 0.75` symmetric difference.
    pub fd_delta075: f64,
}

impl RemainderRow {
    pub const CSV_HEADER: &'static str = "L,theta,d,emp_mean,emp_std,pred_exact,pred_leading,fd_delta075";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{},{},{}", self.l, self.theta, self.d, self.emp_mean, self.emp_std, self.pred_exact, self.pred_leading, self.fd_delta075)
    }
}

/// Squared series errors for `L = 0..=l_max` and the finite-difference error,
/// for one draw of `H₀, H₁ ∼ GUE` and a Haar target.
fn one_draw(config: &RemainderConfig, stream: &RngStream) -> Result<(Vec<f64>, f64)> {
    let d = 1usize << config.n_qubits;
    let mut rng = stream.rng();
    let h0 = gue_sample(&EnsembleSpec::gue(d, config.lambda_a)?, &mut rng);
    let h1 = if config.commuting { h0.matmul(&h0) } else { gue_sample(&EnsembleSpec::gue(d, config.lambda_b)?, &mut rng) };
    let u: CMatrix = haar_unitary(d, &mut rng);
    let cost = match config.cost {
        RemainderCost::Potq => CostSpec::potq(u),
        RemainderCost::Infidelity => CostSpec::infidelity(u),
    };
    let gate = MultiParamGate::new(vec![h0, h1], vec![config.theta, 0.0])?;
    let mut errors = Vec::with_capacity(config.l_max + 1);
    for l in 0..=config.l_max {
        let s = sun_gradient(&gate, &cost, l)?;
        errors.push(s.remainder[1] * s.remainder[1]);
    }
    let (v, dv) = gate.derivative(1);
    let exact = cost.directional(&v, &dv);
    let plus = cost.value(&gate.with_theta(vec![config.theta, FD_SHIFT])?.evaluate())?;
    let minus = cost.value(&gate.with_theta(vec![config.theta, -FD_SHIFT])?.evaluate())?;
    let fd = (plus - minus) / (2.0 * FD_SHIFT);
    Ok((errors, (fd - exact).powi(2)))
}

/// Truncation-error study of `∂/∂θ₁` for `V = exp(−i(θH₀ + θ₁H₁))` at `θ₁ = 0`,
/// one row per `L`. Draw `i` runs on `stream.child(i)`.
pub fn remainder_experiment(config: &RemainderConfig, stream: &RngStream) -> Result<Vec<RemainderRow>> {
    if config.n_draws < 2 {
        return invalid("need at least two draws");
    }
    if config.n_qubits == 0 || config.n_qubits > 7 {
        return invalid("remainder study supports 1 to 7 qubits");
    }
    let d = 1usize << config.n_qubits;
    let draws: Vec<(Vec<f64>, f64)> = (0..config.n_draws).into_par_iter().map(|i| one_draw(config, &stream.child(i as u64))).collect::<Result<_>>()?;
    let fd: Vec<f64> = draws.iter().map(|(_, f)| *f).collect();
    let fd_mean = mean_and_variance(&fd).0;
    let factor = match config.cost {
        RemainderCost::Potq => 1.0,
        RemainderCost::Infidelity => infidelity_prefactor(d),
    };
    (0..=config.l_max)
        .map(|l| {
            let xs: Vec<f64> = draws.iter().map(|(e, _)| e[l]).collect();
            let (mean, var) = mean_and_variance(&xs);
            let exact = expected_remainder_sq(l, config.theta, config.lambda_a, config.lambda_b, d, RemainderKind::ExactSum)?.value;
            let leading = expected_remainder_sq(l, config.theta, config.lambda_a, config.lambda_b, d, RemainderKind::LeadingOrder)?.value;
            Ok(RemainderRow {
                l,
                theta: config.theta,
                d,
                emp_mean: mean,
                emp_std: var.sqrt(),
                pred_exact: factor * exact,
                pred_leading: factor * leading,
                fd_delta075: fd_mean,
            })
        })
        .collect()
}
