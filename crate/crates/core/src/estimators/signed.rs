//! Mixed-sign linear combinations on the LCU circuit.

use crate::error::{invalid, Result};
use crate::qcore::RngStream;
use crate::CMatrix;

use super::lcu::{lcu_joint_probabilities, Dressing, RegisterEntry};
use super::{sample_moments, EstimateReport, EstimatorKind, Problem, Shots};

/// Single-register estimate before and after de-biasing.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasedEstimate {
    /// `offset + ‖a‖₁ z`, the de-biased estimate of the target.
    pub report: EstimateReport,
    /// `z = 2(q₀ − q₁) + (W⁺ − W⁻)⟨M⟩_ρ`, which estimates `Σ a_i m_i / ‖a‖₁`.
    pub z: f64,
    /// `W⁺ − W⁻`; equals `2L⁺/L − 1` for uniform weights.
    pub bias_coefficient: f64,
    /// Estimate of the bare readout mean `Tr(ρ M)` used for de-biasing.
    pub bare_mean: f64,
}

fn joint_for(problem: &Problem, entries: &[RegisterEntry]) -> Result<Vec<f64>> {
    let us: Vec<CMatrix> = problem.terms().iter().map(|t| t.unitary.clone()).collect();
    // {H, 𝕀}: the control is read directly.
    let r1 = Dressing::HH.r1();
    lcu_joint_probabilities(&r1, &CMatrix::identity(2), entries, &us, problem.state())
}

fn moments_of(joint: &[f64], value: impl Fn(usize) -> f64) -> (f64, f64) {
    let mean: f64 = joint.iter().enumerate().map(|(k, p)| p * value(k)).sum();
    let second: f64 = joint.iter().enumerate().map(|(k, p)| p * value(k).powi(2)).sum();
    (mean, (second - mean * mean).max(0.0))
}

/// One register; positive terms act on control 0 and negative terms on
/// control 1, each branch idling on the other terms' register states.
///
/// The idle slots leak the bare readout into both control outcomes, so
/// `2(q₀ − q₁) = Σ w_i s_i m_i − (W⁺ − W⁻)⟨M⟩_ρ`; a separate run of `n` shots on
/// `ρ` estimates `⟨M⟩_ρ` and the bias is added back. Each LCU shot
/// contributes `X = ±2‖a‖₁·value` (sign `+` on control 0).
pub fn lcu_signed_biased(problem: &Problem, shots: &Shots, stream: &RngStream) -> Result<BiasedEstimate> {
    let budget = shots.single()?;
    let w = problem.weights()?;
    if w.n_neg == 0 {
        return invalid("all coefficients are positive: use lcu_estimate");
    }
    let entries: Vec<RegisterEntry> = (0..w.len())
        .map(|i| {
            let pos = w.raw[i] > 0.0;
            RegisterEntry { weight: w.w[i], branch: [pos.then_some(i), (!pos).then_some(i)] }
        })
        .collect();
    let joint = joint_for(problem, &entries)?;
    let d = problem.dim();
    let norm = w.one_norm;
    let xval = |k: usize| {
        let (c, x) = (k / d, k % d);
        let s = if c == 0 { 2.0 } else { -2.0 };
        s * norm * problem.value(x)
    };
    let (wp, wn) = w.split_mass();
    let beta = wp - wn;
    let bare_probs: Vec<f64> = {
        use crate::qcore::Real;
        problem.state().probabilities().iter().map(|p| p.to_f64_lossy()).collect()
    };
    let (m0, s0) = moments_of(&bare_probs, |x| problem.value(x));
    let (mx, vx) = moments_of(&joint, xval);

    let mut report = EstimateReport::new(EstimatorKind::LcuSignedBiased, stream.seed);
    report.circuits_used = 2;
    let (xbar, m0_hat) = match budget {
        None => {
            report.analytic_variance = vx + (norm * beta).powi(2) * s0;
            (mx, m0)
        }
        Some(n) => {
            let nf = n as f64;
            let mx_s = sample_moments(&joint, n, &stream.child(0), xval)?;
            let m0_s = sample_moments(&bare_probs, n, &stream.child(1), |x| problem.value(x))?;
            report.analytic_variance = vx / nf + (norm * beta).powi(2) * s0 / nf;
            report.empirical_variance = mx_s.variance() / nf + (norm * beta).powi(2) * m0_s.variance() / nf;
            report.shots_total = 2 * n as u64;
            (mx_s.mean(), m0_s.mean())
        }
    };
    let z = xbar / norm + beta * m0_hat;
    report.mean = problem.offset() + norm * z;
    report.bias = Some((norm * beta * m0_hat).abs());
    Ok(BiasedEstimate { report, z, bias_coefficient: beta, bare_mean: m0_hat })
}

/// Two registers, one per sign; control 0 applies `U⁺_i`, control 1 applies
/// `U⁻_k`, giving `C = 2(‖a⁺‖₁e₀ − ‖a⁻‖₁e₁)` with no bias. Per-shot values are
/// `2‖a⁺‖₁·value` on control 0 and `−2‖a⁻‖₁·value` on control 1.
pub fn lcu_signed_unbiased(problem: &Problem, shots: &Shots, stream: &RngStream) -> Result<EstimateReport> {
    let budget = shots.single()?;
    let w = problem.weights()?;
    if w.n_pos == 0 || w.n_neg == 0 {
        return invalid("the two-register estimator needs both signs");
    }
    let (norm_p, norm_n) = w.split_norms();
    let pos: Vec<usize> = (0..w.len()).filter(|&i| w.raw[i] > 0.0).collect();
    let neg: Vec<usize> = (0..w.len()).filter(|&i| w.raw[i] < 0.0).collect();
    let mut entries = Vec::with_capacity(pos.len() * neg.len());
    for &i in &pos {
        for &k in &neg {
            let weight = (w.raw[i] / norm_p) * (-w.raw[k] / norm_n);
            entries.push(RegisterEntry { weight, branch: [Some(i), Some(k)] });
        }
    }
    let joint = joint_for(problem, &entries)?;
    let d = problem.dim();
    let xval = |k: usize| {
        let (c, x) = (k / d, k % d);
        let s = if c == 0 { 2.0 * norm_p } else { -2.0 * norm_n };
        s * problem.value(x)
    };
    let (mx, vx) = moments_of(&joint, xval);
    let mut report = EstimateReport::new(EstimatorKind::LcuSignedUnbiased, stream.seed);
    report.circuits_used = 1;
    match budget {
        None => {
            report.mean = problem.offset() + mx;
            report.analytic_variance = vx;
        }
        Some(n) => {
            let m = sample_moments(&joint, n, stream, xval)?;
            report.mean = problem.offset() + m.mean();
            report.analytic_variance = vx / n as f64;
            report.empirical_variance = m.variance() / n as f64;
            report.shots_total = n as u64;
        }
    }
    Ok(report)
}
