//! Classical comparators: the correlated-Bernoulli variance bound, the
//! per-shot variance ordering LCU ≥ classical maximum ≥ SE, and total shot
//! counts to reach a target precision.

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceBound {
    /// `(Σ w_i √(p_i(1 − p_i)))²`, the largest variance any correlation of the
    /// Bernoulli variables can give `Σ w_i X_i`.
    pub lhs: f64,
    /// `p̄(1 − p̄)`, the LCU single-shot variance.
    pub rhs: f64,
    pub holds: bool,
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return invalid("weights must lie in [0, 1]");
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

pub fn covariance_bound_check(w: &[f64], p: &[f64]) -> Result<CovarianceBound> {
    if w.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), found: p.len() });
    }
    check_weights(w)?;
    if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return invalid("probabilities must lie in [0, 1]");
    }
    let s: f64 = w.iter().zip(p).map(|(w, p)| w * (p * (1.0 - p)).sqrt()).sum();
    let pbar: f64 = w.iter().zip(p).map(|(w, p)| w * p).sum();
    let (lhs, rhs) = (s * s, pbar * (1.0 - pbar));
    Ok(CovarianceBound { lhs, rhs, holds: lhs <= rhs + 1e-12 })
}

/// Single-shot variances of `Σ a_i m_i` with parity readouts `m_i ∈ [−1, 1]`,
/// per shot of each circuit involved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceOrdering {
    /// `‖a‖₁²(1 − m̄²)` with `m̄ = Σ w_i sign(a_i) m_i`.
    pub lcu: f64,
    /// `‖a‖₁²(Σ w_i √(1 − m_i²))²`.
    pub classical_max: f64,
    /// `Σ a_i²(1 − m_i²)`.
    pub se: f64,
}

impl VarianceOrdering {
    pub fn holds(&self) -> bool {
        let tol = 1e-12 * self.lcu.max(1.0);
        self.lcu + tol >= self.classical_max && self.classical_max + tol >= self.se
    }
}

fn check_means(a: &[f64], m: &[f64]) -> Result<()> {
    if a.len() != m.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: m.len() });
    }
    if a.is_empty() || a.iter().all(|&x| x == 0.0) {
        return invalid("need at least one nonzero coefficient");
    }
    if m.iter().any(|x| !(-1.0..=1.0).contains(x)) {
        return invalid("parity means must lie in [−1, 1]");
    }
    Ok(())
}

pub fn variance_ordering(a: &[f64], m: &[f64]) -> Result<VarianceOrdering> {
    check_means(a, m)?;
    let norm: f64 = a.iter().map(|x| x.abs()).sum();
    let mbar: f64 = a.iter().zip(m).map(|(a, m)| a * m).sum::<f64>() / norm;
    let spread: f64 = a.iter().zip(m).map(|(a, m)| a.abs() / norm * (1.0 - m * m).sqrt()).sum();
    Ok(VarianceOrdering {
        lcu: norm * norm * (1.0 - mbar * mbar),
        classical_max: norm * norm * spread * spread,
        se: a.iter().zip(m).map(|(a, m)| a * a * (1.0 - m * m)).sum(),
    })
}

/// Total SE shots for variance `ε²` with the same budget on each of the `L` circuits.
pub fn se_total_shots(a: &[f64], m: &[f64], eps: f64) -> Result<f64> {
    let v = variance_ordering(a, m)?;
    Ok(a.len() as f64 * v.se / (eps * eps))
}

/// LCU shots for variance `ε²`.
pub fn lcu_total_shots(a: &[f64], m: &[f64], eps: f64) -> Result<f64> {
    let v = variance_ordering(a, m)?;
    Ok(v.lcu / (eps * eps))
}
