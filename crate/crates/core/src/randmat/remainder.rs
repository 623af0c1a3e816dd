//! Mean squared truncation error `E[R_L²]` of the gradient series for
//! `V = exp(−iθ(A + θ₁B))` at `θ₁ = 0`, with `V U†` Haar and `A`, `B` GUE.
//!
//! With `r_L(x) = Σ_{l>L} (−i)^{l+1} x^l/(l+1)!` and gaps `Δ = λ_p − λ_q` of `A`,
//! `E[R_L²] = Λ_B²(d−1)/(2d³) · E|r_L(θΔ)|²`. Expanding the square pairs orders
//! `l + m = 2k` with phase `(−1)^{k−m}`, and the inner sum over `m` collapses to
//! `2(−1)^{k+1+L} binom(2k+1, L+1)/(2k+2)!`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};

use super::{gap_coefficient, ln_binomial, ln_gap_coefficient};

/// Last order of the `k`-sum before the divergence guard trips.
pub const K_MAX: usize = 200;
/// Relative size of the last term at which the `k`-sum stops.
const TAIL_TOL: f64 = 1e-15;
/// Largest tolerated ratio of the biggest term to the result.
const CANCELLATION_LIMIT: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RemainderKind {
    ExactSum,
    LeadingOrder,
    Infidelity,
    Correlated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderPrediction {
    pub l: usize,
    pub value: f64,
    pub kind: RemainderKind,
}

/// `4(d²−2)/(d³(d−1))`, the factor relating the infidelity and POTQ remainders.
pub fn infidelity_prefactor(d: usize) -> f64 {
    let d = d as f64;
    4.0 * (d * d - 2.0) / (d * d * d * (d - 1.0))
}

/// `4(d²−2)/(d²(d²−1))`, the same factor with the Haar fourth moments summed as
/// `2/(d(d+1)) + (d−2)/(d²−1) = (d²−2)/(d(d²−1))`.
pub fn infidelity_prefactor_haar(d: usize) -> f64 {
    let d = d as f64;
    4.0 * (d * d - 2.0) / (d * d * (d * d - 1.0))
}

fn check(theta: f64, lambda_a: f64, lambda_b: f64, d: usize) -> Result<()> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return invalid("θ norm must be nonnegative and finite");
    }
    if !(lambda_a > 0.0 && lambda_b > 0.0 && lambda_a.is_finite() && lambda_b.is_finite()) {
        return invalid("Λ_A and Λ_B must be positive");
    }
    if d < 2 {
        return invalid("dimension must be at least 2");
    }
    Ok(())
}

fn prefactor(lambda_b: f64, d: usize) -> f64 {
    let d = d as f64;
    lambda_b * lambda_b * (d - 1.0) / (2.0 * d * d * d)
}

/// `E|r_L(θΔ)|²/Λ-free` series in `x = θΛ_A`, summed over `k > L`.
fn exact_series(l: usize, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let lx = x.ln();
    let mut sum = 0.0;
    let mut biggest: f64 = 0.0;
    let mut prev = f64::INFINITY;
    for k in l + 1..=K_MAX {
        let ln_mag = std::f64::consts::LN_2 + 2.0 * k as f64 * lx + ln_gap_coefficient(k) + ln_binomial(2 * k + 1, l + 1) - ln_gamma(2.0 * k as f64 + 3.0);
        let mag = ln_mag.exp();
        let sign = if (k + 1 + l) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * mag;
        biggest = biggest.max(mag);
        // Term magnitudes are eventually decreasing with ratio → 0, so once the
        // ratio is below ½ the alternating tail is smaller than the last term.
        if mag < prev * 0.5 && mag <= TAIL_TOL * sum.abs() {
            if biggest > CANCELLATION_LIMIT * sum.abs() {
                return Err(Error::Numerical(format!("remainder k-sum loses all precision at θΛ = {x}")));
            }
            return Ok(sum.max(0.0));
        }
        prev = mag;
    }
    Err(Error::Numerical(format!("remainder k-sum did not meet its tail bound by k = {K_MAX} at θΛ = {x}")))
}

/// `x^{2(L+1)} Σ_l binom(2(L+1), 2l) C_l C_{L+1−l}/(L+2)!²`.
fn leading_series(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let k = l + 1;
    if k < 60 {
        x.powi(2 * k as i32) * gap_coefficient(k) / ln_gamma(k as f64 + 2.0).exp().powi(2)
    } else {
        (2.0 * k as f64 * x.ln() + ln_gap_coefficient(k) - 2.0 * ln_gamma(k as f64 + 2.0)).exp()
    }
}

/// Predicted `E[R_L²]` (POTQ) or `E[𝓡_L²]` (infidelity, exact sum times
/// [`infidelity_prefactor`]). Use [`correlated_remainder_sq`] for the
/// partially optimized case.
pub fn expected_remainder_sq(l: usize, theta_norm: f64, lambda_a: f64, lambda_b: f64, d: usize, kind: RemainderKind) -> Result<RemainderPrediction> {
    check(theta_norm, lambda_a, lambda_b, d)?;
    let x = theta_norm * lambda_a;
    let p = prefactor(lambda_b, d);
    let value = match kind {
        RemainderKind::ExactSum => p * exact_series(l, x)?,
        RemainderKind::LeadingOrder => p * leading_series(l, x),
        RemainderKind::Infidelity => infidelity_prefactor(d) * p * exact_series(l, x)?,
        RemainderKind::Correlated => return invalid("the correlated remainder needs a fidelity; use correlated_remainder_sq"),
    };
    Ok(RemainderPrediction { l, value, kind })
}

/// `2(d−1)(F − F²)Λ_B²/d³` times the exact series, for a target whose fidelity
/// with the current gate is `F`.
pub fn correlated_remainder_sq(l: usize, theta_norm: f64, lambda_a: f64, lambda_b: f64, d: usize, fidelity: f64) -> Result<RemainderPrediction> {
    check(theta_norm, lambda_a, lambda_b, d)?;
    if !(0.0..=1.0).contains(&fidelity) {
        return invalid("fidelity must lie in [0, 1]");
    }
    let df = d as f64;
    let value = 2.0 * (df - 1.0) * (fidelity - fidelity * fidelity) * lambda_b * lambda_b / (df * df * df) * exact_series(l, theta_norm * lambda_a)?;
    Ok(RemainderPrediction { l, value, kind: RemainderKind::Correlated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::sampling::{haar_unitary, mean_and_variance};
    use crate::qcore::{RngStream, C};
    use crate::CMatrix;
    use std::f64::consts::PI;

    /// `|r_L(x)|²` by direct summation.
    fn r_sq(l: usize, x: f64) -> f64 {
        let mut z = C::new(0.0, 0.0);
        let mut phase = C::new(0.0, -1.0);
        let mut pow_over_fact = 1.0;
        for j in 0..l + 120 {
            if j > 0 {
                phase *= C::new(0.0, -1.0);
                pow_over_fact *= x / (j + 1) as f64;
            } else {
                pow_over_fact = 1.0;
            }
            if j > l {
                z += phase * pow_over_fact;
            }
        }
        z.norm_sqr()
    }

    /// `E|r_L(θΔ)|²` over two independent semicircle eigenvalues by
    /// Gauss–Chebyshev quadrature of the second kind.
    fn quadrature_series(l: usize, x: f64) -> f64 {
        let n = 160;
        let nodes: Vec<(f64, f64)> = (1..=n)
            .map(|i| {
                let t = i as f64 * PI / (n + 1) as f64;
                (2.0 * t.cos(), 2.0 / PI * PI / (n + 1) as f64 * t.sin().powi(2))
            })
            .collect();
        let mut acc = 0.0;
        for (a, wa) in &nodes {
            for (b, wb) in &nodes {
                acc += wa * wb * r_sq(l, x * (a - b));
            }
        }
        acc
    }

    #[test]
    fn leading_order_example() {
        let p = expected_remainder_sq(0, 0.5, 1.0, 1.0, 2, RemainderKind::LeadingOrder).unwrap();
        assert!((p.value - 0.0078125).abs() < 1e-15);
        for kind in [RemainderKind::ExactSum, RemainderKind::LeadingOrder, RemainderKind::Infidelity] {
            for l in 0..5 {
                assert_eq!(expected_remainder_sq(l, 0.0, 1.0, 1.0, 8, kind).unwrap().value, 0.0);
            }
        }
    }

    #[test]
    fn leading_order_power_law() {
        for l in 0..6 {
            let a = expected_remainder_sq(l, 0.2, 1.0, 1.0, 8, RemainderKind::LeadingOrder).unwrap().value;
            let b = expected_remainder_sq(l, 0.4, 1.0, 1.0, 8, RemainderKind::LeadingOrder).unwrap().value;
            assert!((b / a - 2f64.powi(2 * (l as i32 + 1))).abs() < 1e-9 * b / a);
        }
    }

    #[test]
    fn exact_sum_matches_quadrature() {
        for &x in &[0.2, 0.5, 1.0, 1.5] {
            for l in [0usize, 1, 3, 6] {
                let analytic = exact_series(l, x).unwrap();
                let quad = quadrature_series(l, x);
                assert!((analytic - quad).abs() <= 1e-9 * quad.max(1e-300) + 1e-300, "x={x} L={l}: {analytic} {quad}");
            }
        }
    }

    #[test]
    fn leading_order_regime() {
        for l in 0..10 {
            for &x in &[0.05, 0.1, 0.2, 0.3] {
                let e = exact_series(l, x).unwrap();
                let lead = leading_series(l, x);
                assert!((lead / e - 1.0).abs() < 0.1, "L={l} x={x}: {}", lead / e);
            }
        }
        // The next order enters with a negative sign, so the leading term overshoots.
        let (e, lead) = (exact_series(0, 1.5).unwrap(), leading_series(0, 1.5));
        assert!(lead > 1.3 * e);
    }

    #[test]
    fn predictions_are_nonnegative_and_decreasing() {
        for &x in &[0.1, 0.5, 0.9, 0.99] {
            let mut prev = f64::INFINITY;
            for l in 0..25 {
                let v = exact_series(l, x).unwrap();
                assert!(v >= 0.0 && v <= prev, "x={x} L={l}");
                prev = v;
            }
        }
    }

    #[test]
    fn divergence_guard() {
        assert!(exact_series(0, 40.0).is_err());
        assert!(expected_remainder_sq(0, 1.0, 1.0, 1.0, 1, RemainderKind::ExactSum).is_err());
        assert!(expected_remainder_sq(0, 1.0, 1.0, 1.0, 4, RemainderKind::Correlated).is_err());
    }

    #[test]
    fn correlated_factor() {
        let f = |fid: f64| correlated_remainder_sq(1, 0.5, 1.0, 1.0, 8, fid).unwrap().value;
        assert_eq!(f(1.0), 0.0);
        assert_eq!(f(0.0), 0.0);
        assert!((f(0.5) / f(0.25) - 4.0 / 3.0).abs() < 1e-12);
        let exact = expected_remainder_sq(1, 0.5, 1.0, 1.0, 8, RemainderKind::ExactSum).unwrap().value;
        assert!((f(0.5) - exact).abs() < 1e-15 * exact.max(1.0));
        assert!(f(0.5) >= f(0.4) && f(0.5) >= f(0.6));
        assert!(correlated_remainder_sq(1, 0.5, 1.0, 1.0, 8, 1.2).is_err());
    }

    #[test]
    fn infidelity_prefactors() {
        assert!((infidelity_prefactor(8) - 4.0 * 62.0 / (512.0 * 7.0)).abs() < 1e-15);
        assert!((infidelity_prefactor(2) - 1.0).abs() < 1e-15);
        for d in [2usize, 4, 8, 64] {
            assert!((infidelity_prefactor(d) / infidelity_prefactor_haar(d) - (d as f64 + 1.0) / d as f64).abs() < 1e-12);
        }
        // Haar fourth moments: Σ_s E|w_ss|²|w_qp|² = (d²−2)/(d(d²−1)) for p ≠ q.
        let d = 4;
        let mut rng = RngStream::new(110, 0).rng();
        let n = 40_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                let w: CMatrix = haar_unitary(d, &mut rng);
                (0..d).map(|s| w[(s, s)].norm_sqr()).sum::<f64>() * w[(1, 0)].norm_sqr()
            })
            .collect();
        let (m, var) = mean_and_variance(&xs);
        let df = d as f64;
        assert!((m - (df * df - 2.0) / (df * (df * df - 1.0))).abs() < 4.0 * (var / n as f64).sqrt(), "{m}");
    }
}
