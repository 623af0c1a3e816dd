//! Coherent-state LCU weights for the first-parameter derivative of
//! `V(θ₁) = exp(−i(Δt H₀ + θ₁ H₁))` at `θ₁ = 0`.
//!
//! Register entry 0 carries the bias `b = Re Tr(ρ_c O)` and entry `l ≥ 1`
//! carries `g_{l−1}`, with `g_j = (½)^j Re[(−i)^{j+1} Tr(ad^j_{H₀}(H₁) ρ_c O)]`
//! and `ρ_c = V ρ V†`. Since `∂C/∂θ₁ = (1/Δt) Σ_{l≥1} (2Δt)^l/l! g_{l−1}`, the
//! control bias satisfies `M_L (e₊ − e₋) = b + Δt ∂C/∂θ₁` up to truncation.

use rand::Rng;
use rand_distr::Binomial;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::estimators::Shots;
use crate::qcore::linalg::exp_i_hermitian;
use crate::qcore::{RngStream, C};
use crate::{CMatrix, Obs, State};

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentWeights {
    pub dt: f64,
    pub truncation: usize,
    /// Poisson weights `(2Δt)^l e^{−2Δt}/l!` for `l < L`.
    pub weights: Vec<f64>,
    /// `M_L = Σ_{l<L} (2Δt)^l/l!`.
    pub m_l: f64,
}

impl CoherentWeights {
    /// Register amplitudes squared after truncation: `(2Δt)^l/(l! M_L)`.
    pub fn normalized(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    /// Probability mass lost to truncation.
    pub fn deficit(&self) -> f64 {
        1.0 - self.weights.iter().sum::<f64>()
    }
}

pub fn coherent_lcu_weights(dt: f64, truncation: usize) -> Result<CoherentWeights> {
    if !(dt > 0.0 && dt.is_finite()) {
        return invalid("Δt must be positive and finite");
    }
    if truncation == 0 {
        return invalid("truncation must keep at least one weight");
    }
    let x = 2.0 * dt;
    let weights: Vec<f64> = (0..truncation).map(|l| (l as f64 * x.ln() - x - ln_gamma(l as f64 + 1.0)).exp()).collect();
    let m_l = weights.iter().sum::<f64>() * x.exp();
    Ok(CoherentWeights { dt, truncation, weights, m_l })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentEstimate {
    /// `(M_L (e₊ − e₋) − b)/Δt`.
    pub derivative: f64,
    pub bias: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub m_l: f64,
    /// `M_L² (1 − (e₊ − e₋)²)/(n Δt²)`; single-shot value in exact mode.
    pub analytic_variance: f64,
    pub shots: u64,
}

/// De-biased coherent-LCU estimate of `∂C/∂θ₁` at `θ₁ = 0`.
///
/// Shot mode samples the control readout binomially; `b` is taken as known.
pub fn sun_lcu_estimate(h0: &CMatrix, h1: &CMatrix, state: &State, obs: &Obs, dt: f64, truncation: usize, shots: &Shots, stream: &RngStream) -> Result<CoherentEstimate> {
    if truncation < 2 {
        return invalid("coherent LCU needs L ≥ 2");
    }
    let cw = coherent_lcu_weights(dt, truncation)?;
    let d = state.dim();
    for h in [h0, h1] {
        if h.rows() != d || !h.is_square() {
            return Err(Error::DimensionMismatch { expected: d, found: h.rows() });
        }
        let err = h.hermiticity_error();
        if err > 1e-10 {
            return Err(Error::NotHermitian(err));
        }
    }
    let o = obs.matrix();
    if o.rows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: o.rows() });
    }
    let rho_c = state.density_matrix().conjugate_by(&exp_i_hermitian(h0, dt));
    let rho_o = rho_c.matmul(&o);
    let mut entries = vec![rho_o.trace().re];
    let mut ad = h1.clone();
    let mut phase = C::new(0.0, -1.0);
    let mut half = 1.0;
    for j in 0..truncation - 1 {
        if j > 0 {
            ad = h0.commutator(&ad);
            phase *= C::new(0.0, -1.0);
            half *= 0.5;
        }
        entries.push(half * (phase * ad.trace_product(&rho_o)).re);
    }
    let s: f64 = cw.normalized().iter().zip(&entries).map(|(w, x)| w * x).sum();
    let bias = entries[0];
    let (s_hat, n) = match shots {
        Shots::Exact => (s, 0),
        Shots::Finite(n) if *n > 0 => {
            if s.abs() > 1.0 + 1e-12 {
                return Err(Error::Numerical(format!("register bias {s:.3e} is outside [−1, 1]; rescale the operators")));
            }
            let p = (0.5 * (1.0 + s)).clamp(0.0, 1.0);
            let k = stream.rng().sample(Binomial::new(*n as u64, p).map_err(|e| Error::Numerical(e.to_string()))?);
            (2.0 * k as f64 / *n as f64 - 1.0, *n as u64)
        }
        _ => return invalid("coherent LCU takes exact mode or a positive shot count"),
    };
    let var_shots = n.max(1) as f64;
    Ok(CoherentEstimate {
        derivative: (cw.m_l * s_hat - bias) / dt,
        bias,
        e_plus: 0.5 * (1.0 + s_hat),
        e_minus: 0.5 * (1.0 - s_hat),
        m_l: cw.m_l,
        analytic_variance: cw.m_l * cw.m_l * (1.0 - s * s).max(0.0) / (var_shots * dt * dt),
        shots: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradients::oracle::tests::pauli;
    use crate::gradients::{frechet_gradient_oracle, CostSpec, MultiParamGate};
    use crate::qcore::sampling::random_mixed_state;
    use statrs::distribution::{DiscreteCDF, Poisson};

    #[test]
    fn weights_are_poisson() {
        for dt in [0.05, 0.5, 1.0, 2.0] {
            let w = coherent_lcu_weights(dt, 40).unwrap();
            assert!(w.deficit().abs() < 1e-12, "{dt}");
            let n: f64 = w.normalized().iter().sum();
            assert!((n - 1.0).abs() < 1e-14);
        }
        let w = coherent_lcu_weights(0.5, 4).unwrap();
        assert!((w.weights[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((w.weights[0] - 0.367879).abs() < 1e-6);
        assert!((w.m_l - (1.0 + 1.0 + 0.5 + 1.0 / 6.0)).abs() < 1e-14);
        // The deficit is the Poisson(2Δt) tail P(X ≥ L).
        for dt in [0.1, 0.25, 0.5] {
            let tail = Poisson::new(2.0 * dt).unwrap();
            for l in 2..20u64 {
                let deficit = coherent_lcu_weights(dt, l as usize).unwrap().deficit();
                assert!((deficit - tail.sf(l - 1)).abs() < 1e-14, "{dt} {l}");
            }
        }
        // At Δt = 0.5 the L = 8 tail is 1.025e-5; 1e-6 needs L ≥ 10 there.
        for l in 8..20 {
            for dt in [0.1, 0.25] {
                assert!(coherent_lcu_weights(dt, l).unwrap().deficit() < 1e-6);
            }
            if l >= 10 {
                assert!(coherent_lcu_weights(0.5, l).unwrap().deficit() < 1e-6);
            }
        }
        assert!((coherent_lcu_weights(0.5, 8).unwrap().deficit() - 1.02492e-5).abs() < 1e-9);
        assert!(coherent_lcu_weights(0.0, 4).is_err());
        assert!(coherent_lcu_weights(-0.1, 4).is_err());
    }

    #[test]
    fn exact_mode_matches_oracle() {
        let (h0, h1) = (pauli("ZI"), pauli("XI"));
        let obs = Obs::parse_text("1 ZZ").unwrap();
        let mut rng = RngStream::new(90, 0).rng();
        let rho = random_mixed_state::<f64>(2, &mut rng);
        let dt = 0.1;
        let est = sun_lcu_estimate(&h0, &h1, &rho, &obs, dt, 14, &Shots::Exact, &RngStream::new(1, 0)).unwrap();
        let gate = MultiParamGate::new(vec![h0.clone(), h1.clone()], vec![dt, 0.0]).unwrap();
        let oracle = frechet_gradient_oracle(&CostSpec::observable(&rho, &obs), &gate).unwrap()[1];
        assert!((est.derivative - oracle).abs() < 1e-8, "{} {oracle}", est.derivative);
        assert!((est.e_plus + est.e_minus - 1.0).abs() < 1e-15);
        // Noncommuting pair with a larger step.
        let h0b = &pauli("ZX").scale_real(0.6) + &pauli("YI").scale_real(0.3);
        let est = sun_lcu_estimate(&h0b, &pauli("XY"), &rho, &obs, 0.4, 24, &Shots::Exact, &RngStream::new(1, 0)).unwrap();
        let gate = MultiParamGate::new(vec![h0b, pauli("XY")], vec![0.4, 0.0]).unwrap();
        let oracle = frechet_gradient_oracle(&CostSpec::observable(&rho, &obs), &gate).unwrap()[1];
        assert!((est.derivative - oracle).abs() < 1e-10);
    }

    #[test]
    fn shot_mode_is_unbiased() {
        let (h0, h1) = (pauli("Z"), pauli("X"));
        let obs = Obs::parse_text("1 Z").unwrap();
        let rho = State::from_statevector(vec![C::new(0.6, 0.0), C::new(0.0, 0.8)]).unwrap();
        let exact = sun_lcu_estimate(&h0, &h1, &rho, &obs, 0.3, 12, &Shots::Exact, &RngStream::new(1, 0)).unwrap();
        let reps = 400;
        let xs: Vec<f64> = (0..reps)
            .map(|r| sun_lcu_estimate(&h0, &h1, &rho, &obs, 0.3, 12, &Shots::Finite(500), &RngStream::new(3, r)).unwrap().derivative)
            .collect();
        let (m, var) = crate::qcore::sampling::mean_and_variance(&xs);
        assert!((m - exact.derivative).abs() < 4.0 * (var / reps as f64).sqrt());
        let predicted = sun_lcu_estimate(&h0, &h1, &rho, &obs, 0.3, 12, &Shots::Finite(500), &RngStream::new(3, 0)).unwrap().analytic_variance;
        assert!((var / predicted - 1.0).abs() < 0.2, "{var} {predicted}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let obs = Obs::parse_text("1 Z").unwrap();
        let s = State::zero(1);
        let r = RngStream::new(1, 0);
        assert!(sun_lcu_estimate(&pauli("Z"), &pauli("X"), &s, &obs, 0.0, 8, &Shots::Exact, &r).is_err());
        assert!(sun_lcu_estimate(&pauli("Z"), &pauli("X"), &s, &obs, 0.1, 1, &Shots::Exact, &r).is_err());
        assert!(sun_lcu_estimate(&pauli("ZZ"), &pauli("X"), &s, &obs, 0.1, 8, &Shots::Exact, &r).is_err());
    }
}
