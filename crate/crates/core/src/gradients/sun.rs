use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::qcore::C;
use crate::CMatrix;

use super::{CostSpec, MultiParamGate};

/// `(−i)^n`.
fn minus_i_pow(n: usize) -> C<f64> {
    match n % 4 {
        0 => C::new(1.0, 0.0),
        1 => C::new(0.0, -1.0),
        2 => C::new(-1.0, 0.0),
        _ => C::new(0.0, 1.0),
    }
}

/// `‖θ‖₁^l/(l+1)!`, evaluated in log form so large `l` does not overflow.
fn series_coefficient(norm: f64, l: usize) -> f64 {
    if l == 0 {
        return 1.0;
    }
    if norm == 0.0 {
        return 0.0;
    }
    (l as f64 * norm.ln() - ln_gamma(l as f64 + 2.0)).exp()
}

/// `H̄ = H/‖θ‖₁`, or the raw `H` when `θ = 0` (only `l = 0` survives then).
fn normalized_hamiltonian(gate: &MultiParamGate) -> CMatrix {
    let norm = gate.one_norm();
    let h = gate.hamiltonian();
    if norm > 0.0 {
        h.scale_real(1.0 / norm)
    } else {
        h
    }
}

fn check(cost: &CostSpec, gate: &MultiParamGate) -> Result<()> {
    if cost.dim() != gate.dim() {
        return Err(Error::DimensionMismatch { expected: cost.dim(), found: gate.dim() });
    }
    Ok(())
}

/// Order-`l` term `T_l` of the nested-commutator gradient series, one entry per
/// parameter: the cost's chain rule applied to
/// `W_l = (−i)^{l+1} ‖θ‖₁^l/(l+1)! ad_{H̄}^l(H_k) V`.
pub fn sun_series_term(gate: &MultiParamGate, cost: &CostSpec, l: usize) -> Result<Vec<f64>> {
    check(cost, gate)?;
    let v = gate.evaluate();
    let hbar = normalized_hamiltonian(gate);
    let coef = minus_i_pow(l + 1) * series_coefficient(gate.one_norm(), l);
    Ok(gate
        .generators()
        .iter()
        .map(|hk| {
            let mut ad = hk.clone();
            for _ in 0..l {
                ad = hbar.commutator(&ad);
            }
            cost.directional(&v, &ad.matmul(&v).scale(coef))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SunGradient {
    /// `Σ_{l≤L} T_l`.
    pub gradient: Vec<f64>,
    /// Per-parameter `|oracle − truncated|`.
    pub remainder: Vec<f64>,
    /// `max_k ‖∂V/∂θ_k − Σ_{l≤L} W_l‖` in spectral norm.
    pub d_inf: f64,
}

/// Series gradient truncated at order `L`, with the remainder measured against
/// the block-exponential derivative.
pub fn sun_gradient(gate: &MultiParamGate, cost: &CostSpec, order: usize) -> Result<SunGradient> {
    check(cost, gate)?;
    let v = gate.evaluate();
    let hbar = normalized_hamiltonian(gate);
    let norm = gate.one_norm();
    let per_param: Vec<Result<(f64, f64, f64)>> = (0..gate.len())
        .into_par_iter()
        .map(|k| {
            let mut ad = gate.generators()[k].clone();
            let mut w_sum = CMatrix::zeros(v.rows(), v.cols());
            for l in 0..=order {
                if l > 0 {
                    if norm == 0.0 {
                        break;
                    }
                    ad = hbar.commutator(&ad);
                }
                let coef = minus_i_pow(l + 1) * series_coefficient(norm, l);
                w_sum = &w_sum + &ad.scale(coef);
            }
            let w_sum = w_sum.matmul(&v);
            let (_, dv) = gate.derivative(k);
            let truncated = cost.directional(&v, &w_sum);
            let exact = cost.directional(&v, &dv);
            Ok((truncated, (exact - truncated).abs(), (&dv - &w_sum).spectral_norm()))
        })
        .collect();
    let mut out = SunGradient { gradient: Vec::new(), remainder: Vec::new(), d_inf: 0.0 };
    for r in per_param {
        let (g, rem, dn) = r?;
        out.gradient.push(g);
        out.remainder.push(rem);
        out.d_inf = out.d_inf.max(dn);
    }
    Ok(out)
}
