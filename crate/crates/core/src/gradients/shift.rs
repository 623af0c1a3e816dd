use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::estimators::{se_estimate, Problem, Shots};
use crate::qcore::linalg::{exp_i_hermitian, hermitian_eigenvalues};
use crate::qcore::sampling::haar_unitary;
use crate::qcore::{observable_expectation, CircuitOp, RngStream, C};
use crate::{CMatrix, Circuit, Obs, State};

/// Unit-eigenvalue gaps closer than this are merged into one frequency.
const FREQ_TOL: f64 = 1e-8;
/// Allowed discrepancy of a rule on the probe points.
const VERIFY_TOL: f64 = 1e-6;

/// `∂f/∂θ = Σ_k S_k f(θ + α_k)` for costs whose dependence on one rotation
/// angle is a trigonometric polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftRule {
    pub shifts: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl ShiftRule {
    /// Two-term rule for generators with eigenvalues ±1: `f(θ+π/4) − f(θ−π/4)`.
    pub fn pauli() -> Self {
        Self { shifts: vec![PI / 4.0, -PI / 4.0], coefficients: vec![1.0, -1.0] }
    }

    /// Symmetric rule for the frequencies `Ω_r` (distinct positive eigenvalue
    /// gaps of `H`), with shifts `x_μ = (2μ−1)π/(2RΩ_min)` and coefficients
    /// solving `Σ_μ 2c_μ sin(Ω_r x_μ) = Ω_r`.
    pub fn from_generator(h: &CMatrix) -> Result<Self> {
        let ev = hermitian_eigenvalues(h)?;
        let scale = ev.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        let mut freqs: Vec<f64> = Vec::new();
        for (i, a) in ev.iter().enumerate() {
            for b in &ev[i + 1..] {
                let w = (a - b).abs();
                if w > FREQ_TOL * scale && freqs.iter().all(|f| (f - w).abs() > FREQ_TOL * scale) {
                    freqs.push(w);
                }
            }
        }
        if freqs.is_empty() {
            return Ok(Self { shifts: Vec::new(), coefficients: Vec::new() });
        }
        freqs.sort_by(|a, b| a.total_cmp(b));
        let r = freqs.len();
        let xs: Vec<f64> = (1..=r).map(|mu| (2 * mu - 1) as f64 * PI / (2.0 * r as f64 * freqs[0])).collect();
        let m = DMatrix::from_fn(r, r, |i, j| 2.0 * (freqs[i] * xs[j]).sin());
        let c = m
            .lu()
            .solve(&DVector::from_column_slice(&freqs))
            .ok_or_else(|| Error::Numerical("shift-rule system is singular for this spectrum".into()))?;
        let mut shifts = Vec::with_capacity(2 * r);
        let mut coefficients = Vec::with_capacity(2 * r);
        for (x, cm) in xs.iter().zip(c.iter()) {
            shifts.extend([*x, -*x]);
            coefficients.extend([*cm, -*cm]);
        }
        Ok(Self { shifts, coefficients })
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64, theta: f64) -> f64 {
        self.shifts.iter().zip(&self.coefficients).map(|(a, s)| s * f(theta + a)).sum()
    }

    /// Checks the rule on `f(x) = Tr(e^{−ixH} ρ e^{ixH} O)` for a fixed random
    /// `ρ` and `O` at several probe angles.
    pub fn verify(&self, h: &CMatrix) -> Result<()> {
        let d = h.rows();
        let mut rng = RngStream::new(0x5eed, d as u64).rng();
        let w: CMatrix = haar_unitary(d, &mut rng);
        let weights: Vec<f64> = (1..=d).map(|k| k as f64).collect();
        let total: f64 = weights.iter().sum();
        let rho = CMatrix::diagonal(&weights.iter().map(|p| C::new(p / total, 0.0)).collect::<Vec<_>>()).conjugate_by(&w);
        let w2: CMatrix = haar_unitary(d, &mut rng);
        let obs = CMatrix::diagonal(&(0..d).map(|k| C::new(if k % 2 == 0 { 1.0 } else { -0.5 }, 0.0)).collect::<Vec<_>>())
            .conjugate_by(&w2);
        let f = |x: f64| rho.conjugate_by(&exp_i_hermitian(h, x)).trace_product(&obs).re;
        for &x in &[0.0, 0.37, 1.1, -2.3] {
            let rx = rho.conjugate_by(&exp_i_hermitian(h, x));
            let exact = (C::new(0.0, -1.0) * h.commutator(&rx).trace_product(&obs)).re;
            let err = (self.apply(f, x) - exact).abs();
            if err > VERIFY_TOL {
                return invalid(format!("shift rule does not match the generator spectrum (discrepancy {err:.3e} at {x})"));
            }
        }
        Ok(())
    }
}

fn shifted_value(circuit: &Circuit, state: &State, obs: &Obs, theta: &[f64], shift: Option<(usize, f64)>, shots: &Shots, stream: &RngStream) -> Result<f64> {
    let evolved = state.evolve(&circuit.evaluate_shifted(theta, shift)?)?;
    match shots {
        Shots::Exact => observable_expectation(&evolved, obs),
        _ => Ok(se_estimate(&Problem::from_observable(obs, &evolved)?, shots, stream)?.mean),
    }
}

/// Parameter-shift gradient of `⟨O⟩` in `V(θ)ρV(θ)†`.
///
/// A supplied rule is verified against every rotation generator; otherwise each
/// op uses the Pauli rule if its generator squares to the identity and the
/// spectrum-derived rule if not. Ops sharing a parameter add their terms.
/// Shot mode draws each shifted circuit from its own child stream.
pub fn parameter_shift_gradient(
    circuit: &Circuit,
    state: &State,
    obs: &Obs,
    theta: &[f64],
    rule: Option<&ShiftRule>,
    shots: &Shots,
    stream: &RngStream,
) -> Result<Vec<f64>> {
    if state.dim() != circuit.dim() || obs.n() != circuit.n() {
        return Err(Error::DimensionMismatch { expected: circuit.dim(), found: state.dim() });
    }
    let mut grad = vec![0.0; circuit.n_params()];
    let mut job = 0u64;
    for (k, op) in circuit.ops().iter().enumerate() {
        let CircuitOp::Rotation { generator, param, involutory } = op else { continue };
        let own;
        let r = match rule {
            Some(r) => {
                r.verify(generator)?;
                r
            }
            None if *involutory => {
                own = ShiftRule::pauli();
                &own
            }
            None => {
                own = ShiftRule::from_generator(generator)?;
                &own
            }
        };
        for (a, s) in r.shifts.iter().zip(&r.coefficients) {
            grad[*param] += s * shifted_value(circuit, state, obs, theta, Some((k, *a)), shots, &stream.child(job))?;
            job += 1;
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradients::oracle::tests::pauli;
    use crate::gradients::{circuit_frechet_gradient, CostSpec};
    use crate::qcore::sampling::random_mixed_state;
    use rand::Rng;

    fn diag(vals: &[f64]) -> CMatrix {
        CMatrix::diagonal(&vals.iter().map(|v| C::new(*v, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn pauli_rule_on_cosine() {
        let mut c = Circuit::new(1);
        c.push_pauli_rotation(&"X".parse().unwrap(), 0).unwrap();
        let obs = Obs::parse_text("1 Z").unwrap();
        for t in [0.0, 0.3, 1.2, -0.8] {
            let g = parameter_shift_gradient(&c, &State::zero(1), &obs, &[t], None, &Shots::Exact, &RngStream::new(1, 0)).unwrap();
            assert!((g[0] + 2.0 * (2.0 * t).sin()).abs() < 1e-12);
            let f = |x: f64| (2.0 * x).cos();
            let fd = (f(t + 1e-5) - f(t - 1e-5)) / 2e-5;
            assert!((g[0] - fd).abs() < 1e-8);
        }
        assert_eq!(ShiftRule::from_generator(&pauli("X")).unwrap().len(), 2);
        let derived = ShiftRule::from_generator(&pauli("ZY")).unwrap();
        assert!((derived.shifts[0] - PI / 4.0).abs() < 1e-12 && (derived.coefficients[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_cost_has_zero_gradient() {
        let mut c = Circuit::new(2);
        c.push_pauli_rotation(&"XY".parse().unwrap(), 0).unwrap();
        c.push_pauli_rotation(&"ZI".parse().unwrap(), 1).unwrap();
        let obs = Obs::parse_text("2.5 II").unwrap();
        let g = parameter_shift_gradient(&c, &State::zero(2), &obs, &[0.3, 0.9], None, &Shots::Exact, &RngStream::new(1, 0)).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn spectrum_rules_reproduce_derivatives() {
        for spec in [vec![0.0, 1.0, 3.0, 3.0], vec![0.0, 1.0, 2.5, -0.5], vec![0.5, 0.5, -0.5, -0.5]] {
            let h = diag(&spec);
            let rule = ShiftRule::from_generator(&h).unwrap();
            rule.verify(&h).unwrap();
            let mut rng = RngStream::new(9, 0).rng();
            let w: CMatrix = haar_unitary(4, &mut rng);
            let hw = h.conjugate_by(&w);
            ShiftRule::from_generator(&hw).unwrap().verify(&hw).unwrap();
        }
    }

    #[test]
    fn mismatched_rule_is_rejected() {
        let h = diag(&[0.0, 1.0, 3.0, 3.0]);
        assert!(ShiftRule::pauli().verify(&h).is_err());
        let mut c = Circuit::new(2);
        c.push_rotation(h, 0).unwrap();
        let obs = Obs::parse_text("1 XX").unwrap();
        let r = parameter_shift_gradient(&c, &State::zero(2), &obs, &[0.2], Some(&ShiftRule::pauli()), &Shots::Exact, &RngStream::new(1, 0));
        assert!(r.is_err());
    }

    #[test]
    fn three_gate_ansatz_matches_oracle() {
        let mut rng = RngStream::new(61, 0).rng();
        let mut c = Circuit::new(2);
        c.push_pauli_rotation(&"XI".parse().unwrap(), 0).unwrap();
        c.push_fixed(haar_unitary(4, &mut rng)).unwrap();
        c.push_pauli_rotation(&"YZ".parse().unwrap(), 1).unwrap();
        c.push_rotation(diag(&[0.0, 1.0, 2.0, 3.0]).conjugate_by(&haar_unitary(4, &mut rng)), 2).unwrap();
        let rho = random_mixed_state::<f64>(2, &mut rng);
        let obs = Obs::parse_text("0.6 ZZ\n-1.1 XI\n0.3 YX").unwrap();
        let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(-PI..PI)).collect();
        let psr = parameter_shift_gradient(&c, &rho, &obs, &theta, None, &Shots::Exact, &RngStream::new(1, 0)).unwrap();
        let oracle = circuit_frechet_gradient(&CostSpec::observable(&rho, &obs), &c, &theta).unwrap();
        for (a, b) in psr.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} {b}");
        }
    }

    #[test]
    fn shot_mode_is_unbiased() {
        let mut c = Circuit::new(1);
        c.push_pauli_rotation(&"X".parse().unwrap(), 0).unwrap();
        let obs = Obs::parse_text("1 Z").unwrap();
        let t = 0.4;
        let reps = 200;
        let xs: Vec<f64> = (0..reps)
            .map(|r| parameter_shift_gradient(&c, &State::zero(1), &obs, &[t], None, &Shots::Finite(100), &RngStream::new(7, r)).unwrap()[0])
            .collect();
        let (m, var) = crate::qcore::sampling::mean_and_variance(&xs);
        assert!((m + 2.0 * (2.0 * t).sin()).abs() < 4.0 * (var / reps as f64).sqrt());
    }
}
