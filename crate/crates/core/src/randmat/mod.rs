//! Gaussian-unitary-ensemble sampling, semicircle moments and predictors for
//! the mean squared truncation error of the nested-commutator gradient series.
//!
//! Normalization: `Λ` is the per-eigenvalue RMS, so `E[(1/d) Tr H²] = Λ²` and the
//! spectrum fills the semicircle of radius `2Λ`. The Dyson index is fixed at
//! `β = 2`.

mod experiment;
mod remainder;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};
use crate::qcore::C;
use crate::CMatrix;

pub use experiment::{remainder_experiment, RemainderConfig, RemainderCost, RemainderRow};
pub use remainder::{
    correlated_remainder_sq, expected_remainder_sq, infidelity_prefactor, infidelity_prefactor_haar, RemainderKind, RemainderPrediction, K_MAX,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Ensemble {
    Gue,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub d: usize,
    pub lambda: f64,
    pub kind: Ensemble,
}

impl EnsembleSpec {
    pub fn gue(d: usize, lambda: f64) -> Result<Self> {
        if d < 2 {
            return invalid("ensemble dimension must be at least 2");
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid("Λ must be positive");
        }
        Ok(Self { d, lambda, kind: Ensemble::Gue })
    }

    /// Dyson index.
    pub fn beta(&self) -> u32 {
        match self.kind {
            Ensemble::Gue => 2,
        }
    }
}

/// Hermitian draw with `E|h_ij|² = Λ²/d` for every entry.
pub fn gue_sample(spec: &EnsembleSpec, rng: &mut impl Rng) -> CMatrix {
    let d = spec.d;
    let sd = spec.lambda / (d as f64).sqrt();
    let off = sd * std::f64::consts::FRAC_1_SQRT_2;
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        let x: f64 = rng.sample(StandardNormal);
        h[(i, i)] = C::new(sd * x, 0.0);
        for j in i + 1..d {
            let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            let z = C::new(off * a, off * b);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

pub fn catalan(n: usize) -> f64 {
    (0..n).fold(1.0, |c, k| c * 2.0 * (2 * k + 1) as f64 / (k + 2) as f64)
}

pub(crate) fn ln_catalan(n: usize) -> f64 {
    ln_gamma(2.0 * n as f64 + 1.0) - 2.0 * ln_gamma(n as f64 + 1.0) - ((n + 1) as f64).ln()
}

pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `E[λ^{2m}] = C_m Λ^{2m}` on the semicircle of radius `2Λ`.
pub fn semicircle_moment(m: usize, lambda: f64) -> f64 {
    catalan(m) * lambda.powi(2 * m as i32)
}

/// `E[λ^n]`, zero for odd `n`.
pub fn semicircle_raw_moment(n: usize, lambda: f64) -> f64 {
    if n % 2 == 1 {
        0.0
    } else {
        semicircle_moment(n / 2, lambda)
    }
}

/// `Σ_l binom(2m, 2l) C_l C_{m−l}`, the gap moment at `Λ = 1`.
pub(crate) fn gap_coefficient(m: usize) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for l in 0..=m {
        if l > 0 {
            // binom(2m, 2l) from binom(2m, 2l−2).
            let (n, k) = ((2 * m) as f64, (2 * l) as f64);
            binom *= (n - k + 2.0) * (n - k + 1.0) / ((k - 1.0) * k);
        }
        acc += binom * catalan(l) * catalan(m - l);
    }
    acc
}

/// `ln Σ_l binom(2m, 2l) C_l C_{m−l}`, for orders where the sum overflows.
pub(crate) fn ln_gap_coefficient(m: usize) -> f64 {
    let logs: Vec<f64> = (0..=m).map(|l| ln_binomial(2 * m, 2 * l) + ln_catalan(l) + ln_catalan(m - l)).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + logs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// `E[(λ_p − λ_q)^{2m}]` for independent semicircle eigenvalues.
pub fn eigengap_moment(m: usize, lambda: f64) -> f64 {
    gap_coefficient(m) * lambda.powi(2 * m as i32)
}

/// `E[(λ_p − λ_q)^n]`, zero for odd `n`.
pub fn eigengap_raw_moment(n: usize, lambda: f64) -> f64 {
    if n % 2 == 1 {
        0.0
    } else {
        eigengap_moment(n / 2, lambda)
    }
}

/// Semicircle CDF on `[−2Λ, 2Λ]`.
pub fn semicircle_cdf(x: f64, lambda: f64) -> f64 {
    let r = 2.0 * lambda;
    if x <= -r {
        return 0.0;
    }
    if x >= r {
        return 1.0;
    }
    let u = x / r;
    0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / std::f64::consts::PI
}
