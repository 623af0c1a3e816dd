use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ShotAllocation {
    pub per_problem: Vec<f64>,
    pub total: f64,
}

/// Query allocation minimizing `Σ n_i` subject to `Σ w_i²σ_i²/n_i² = ε²`.
///
/// Stationarity gives `n_i³ ∝ w_i²σ_i²`, so `n_i = (w_iσ_i)^{2/3}·S^{1/2}/ε` and
/// `N_q = S^{3/2}/ε` with `S = Σ (w_iσ_i)^{2/3}`. Problems with `w_iσ_i = 0` get
/// nothing; if all vanish the allocation is all zeros.
pub fn optimal_shot_allocation(sigmas: &[f64], weights: &[f64], eps: f64) -> Result<ShotAllocation> {
    if sigmas.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: sigmas.len(), found: weights.len() });
    }
    if !(eps > 0.0) {
        return invalid("ε must be positive");
    }
    if sigmas.iter().any(|s| !(*s >= 0.0)) || weights.iter().any(|w| !w.is_finite()) {
        return invalid("σ must be nonnegative and weights finite");
    }
    let c: Vec<f64> = sigmas.iter().zip(weights).map(|(s, w)| (w.abs() * s).powf(2.0 / 3.0)).collect();
    let s: f64 = c.iter().sum();
    if s == 0.0 {
        return Ok(ShotAllocation { per_problem: vec![0.0; c.len()], total: 0.0 });
    }
    let per_problem: Vec<f64> = c.iter().map(|ci| ci * s.sqrt() / eps).collect();
    Ok(ShotAllocation { total: s.powf(1.5) / eps, per_problem })
}

/// `‖a‖₁² p̄(1 − p̄)/n_q²`.
pub fn amplified_lcu_variance(one_norm: f64, p_bar: f64, n_q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_bar) || !(n_q >= 1.0) {
        return invalid("need p̄ ∈ [0, 1] and n_q ≥ 1");
    }
    Ok(one_norm * one_norm * p_bar * (1.0 - p_bar) / (n_q * n_q))
}

/// Queries for which the amplified LCU variance equals `ε²`.
pub fn queries_for_precision(one_norm: f64, p_bar: f64, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_bar) || !(eps > 0.0) {
        return invalid("need p̄ ∈ [0, 1] and ε > 0");
    }
    Ok(one_norm * (p_bar * (1.0 - p_bar)).sqrt() / eps)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaAmplifiedVariance {
    /// `(1/N_U)[E₁(1/n_q² − E₁) + (1 − 1/n_q²)E₂]`.
    pub value: f64,
    /// `E₂/N_U`, independent of `n_q`.
    pub bound: f64,
    /// Whether `value ≤ bound`; this holds iff `n_q² ≥ (E₁ − E₂)/E₁²`.
    pub bound_holds: bool,
}

/// Variance of the amplified single-ancilla estimator from the moments
/// `E₁ = E_U[p_AE]` and `E₂ = E_U[p_AE²]`.
pub fn sa_lcu_amplified_variance(n_unitaries: u64, n_q: f64, e1: f64, e2: f64) -> Result<SaAmplifiedVariance> {
    if n_unitaries == 0 || !(n_q >= 1.0) {
        return invalid("need N_U ≥ 1 and n_q ≥ 1");
    }
    if !(0.0..=1.0).contains(&e1) || e2 < e1 * e1 - 1e-15 || e2 > e1 + 1e-15 {
        return invalid("inconsistent moments: need E[p]² ≤ E[p²] ≤ E[p] ≤ 1");
    }
    let nu = n_unitaries as f64;
    let inv = 1.0 / (n_q * n_q);
    let value = (e1 * (inv - e1) + (1.0 - inv) * e2) / nu;
    let bound = e2 / nu;
    Ok(SaAmplifiedVariance { value, bound, bound_holds: value <= bound + 1e-15 })
}
