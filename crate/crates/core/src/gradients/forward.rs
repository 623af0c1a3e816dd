use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::estimators::Shots;
use crate::qcore::{CircuitOp, RngStream, C};
use crate::{CMatrix, Circuit, Obs, State};

use super::parameter_shift_gradient;

/// Largest parameter count for which every Rademacher direction is enumerated.
const MAX_EXHAUSTIVE: usize = 10;

/// Direction distribution for the forward-gradient estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Directions {
    /// `n` i.i.d. Rademacher vectors.
    Rademacher(usize),
    /// All `2^N` sign vectors, each once.
    Exhaustive,
}

/// Partials `∂C/∂θ_p = Σ_k −i Tr(O_k [H_k, ρ_k])`, with `ρ_k` the state after
/// op `k` and `O_k` the observable pulled back through the later ops.
fn commutator_partials(circuit: &Circuit, state: &State, obs: &Obs, theta: &[f64]) -> Result<Vec<f64>> {
    let ops = circuit.bound_ops(theta, None)?;
    let mut rhos = Vec::with_capacity(ops.len());
    let mut rho = state.density_matrix();
    for g in &ops {
        rho = rho.conjugate_by(g);
        rhos.push(rho.clone());
    }
    let mut o: CMatrix = obs.matrix();
    let mut grad = vec![0.0; circuit.n_params()];
    for k in (0..ops.len()).rev() {
        if let CircuitOp::Rotation { generator, param, .. } = &circuit.ops()[k] {
            grad[*param] += (C::new(0.0, -1.0) * generator.commutator(&rhos[k]).trace_product(&o)).re;
        }
        o = o.conjugate_by(&ops[k].adjoint());
    }
    Ok(grad)
}

/// Directional derivative `∇_v C = v · ∇C`.
///
/// Exact mode uses the commutator form on intermediate states. Shot mode
/// combines parameter-shift estimates of the parameters with `v_p ≠ 0`.
pub fn forward_derivative(circuit: &Circuit, state: &State, obs: &Obs, theta: &[f64], v: &[f64], shots: &Shots, stream: &RngStream) -> Result<f64> {
    if v.len() != circuit.n_params() {
        return Err(Error::DimensionMismatch { expected: circuit.n_params(), found: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return invalid("direction must be finite");
    }
    if v.iter().all(|x| *x == 0.0) {
        return Ok(0.0);
    }
    if state.dim() != circuit.dim() || obs.n() != circuit.n() {
        return Err(Error::DimensionMismatch { expected: circuit.dim(), found: state.dim() });
    }
    let partials = match shots {
        Shots::Exact => commutator_partials(circuit, state, obs, theta)?,
        _ => parameter_shift_gradient(circuit, state, obs, theta, None, shots, stream)?,
    };
    Ok(partials.iter().zip(v).map(|(g, x)| g * x).sum())
}

/// `∇C ≈ mean over directions of g_v v`, which is unbiased because
/// `E[v vᵀ] = 𝕀` for Rademacher `v`.
pub fn forward_gradient(circuit: &Circuit, state: &State, obs: &Obs, theta: &[f64], directions: Directions, shots: &Shots, stream: &RngStream) -> Result<Vec<f64>> {
    let n = circuit.n_params();
    let dirs: Vec<Vec<f64>> = match directions {
        Directions::Exhaustive => {
            if n > MAX_EXHAUSTIVE {
                return invalid(format!("exhaustive directions need at most {MAX_EXHAUSTIVE} parameters, got {n}"));
            }
            (0..1usize << n).map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect()
        }
        Directions::Rademacher(count) => {
            if count == 0 {
                return invalid("need at least one direction");
            }
            let mut rng = stream.rng();
            (0..count).map(|_| (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()).collect()
        }
    };
    let mut acc = vec![0.0; n];
    for (i, v) in dirs.iter().enumerate() {
        let g = forward_derivative(circuit, state, obs, theta, v, shots, &stream.child(i as u64 + 1))?;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += g * x;
        }
    }
    Ok(acc.into_iter().map(|a| a / dirs.len() as f64).collect())
}
