use crate::error::{Error, Result};
use crate::qcore::linalg::expm_frechet;
use crate::qcore::{CircuitOp, C};
use crate::{CMatrix, Circuit};

use super::{CostSpec, MultiParamGate};

fn check_dim(cost: &CostSpec, d: usize) -> Result<()> {
    if cost.dim() != d {
        return Err(Error::DimensionMismatch { expected: cost.dim(), found: d });
    }
    Ok(())
}

/// Exact cost gradient of a multi-parameter gate: `∂V/∂θ_k` from the block
/// exponential, chained through the cost.
pub fn frechet_gradient_oracle(cost: &CostSpec, gate: &MultiParamGate) -> Result<Vec<f64>> {
    check_dim(cost, gate.dim())?;
    Ok((0..gate.len())
        .map(|k| {
            let (v, dv) = gate.derivative(k);
            cost.directional(&v, &dv)
        })
        .collect())
}

/// `V(θ)` of a product circuit and `∂V/∂θ_p` for every parameter.
pub fn circuit_unitary_gradient(circuit: &Circuit, theta: &[f64]) -> Result<(CMatrix, Vec<CMatrix>)> {
    let ops = circuit.bound_ops(theta, None)?;
    let d = circuit.dim();
    let n = ops.len();
    // prefix[k] = G_k ⋯ G_1 (k ops applied), suffix[k] = G_N ⋯ G_{k+1}.
    let mut prefix = vec![CMatrix::identity(d)];
    for g in &ops {
        let next = g.matmul(prefix.last().expect("nonempty"));
        prefix.push(next);
    }
    let mut suffix = vec![CMatrix::identity(d); n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1].matmul(&ops[k]);
    }
    let mi = C::new(0.0, -1.0);
    let mut grads = vec![CMatrix::zeros(d, d); circuit.n_params()];
    for (k, op) in circuit.ops().iter().enumerate() {
        if let CircuitOp::Rotation { generator, param, .. } = op {
            let (_, dg) = expm_frechet(&generator.scale(mi * theta[*param]), &generator.scale(mi));
            let term = suffix[k + 1].matmul(&dg).matmul(&prefix[k]);
            grads[*param] = &grads[*param] + &term;
        }
    }
    Ok((prefix.pop().expect("nonempty"), grads))
}

/// Exact cost gradient of a product circuit.
pub fn circuit_frechet_gradient(cost: &CostSpec, circuit: &Circuit, theta: &[f64]) -> Result<Vec<f64>> {
    check_dim(cost, circuit.dim())?;
    let (v, dvs) = circuit_unitary_gradient(circuit, theta)?;
    Ok(dvs.iter().map(|dv| cost.directional(&v, dv)).collect())
}
