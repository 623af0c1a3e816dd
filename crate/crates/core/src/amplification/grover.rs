//! Dense Grover operator for small dimensions.
//!
//! The flag is qubit 0, so good states are the upper half of the basis.

use crate::error::{invalid, Result};
use crate::qcore::linalg::gram_schmidt_columns;
use crate::qcore::C;
use crate::{CMatrix, Complex};

pub const MAX_DIM: usize = 16;

fn check_dim(d: usize) -> Result<()> {
    if d < 2 || d > MAX_DIM || !d.is_power_of_two() {
        return invalid(format!("dense Grover construction needs a power-of-two dimension in [2, {MAX_DIM}], got {d}"));
    }
    Ok(())
}

/// A unitary `𝒱` with `𝒱|0⟩ = ψ`, completed by Gram–Schmidt on the basis
/// vectors other than the one with the largest overlap with `ψ`.
pub fn state_preparation(psi: &[Complex]) -> Result<CMatrix> {
    let d = psi.len();
    check_dim(d)?;
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return invalid("ψ must be normalized");
    }
    let pivot = (0..d).fold(0, |b, k| if psi[k].norm_sqr() > psi[b].norm_sqr() { k } else { b });
    let others: Vec<usize> = (0..d).filter(|&k| k != pivot).collect();
    let m = CMatrix::from_fn(d, d, |i, j| {
        if j == 0 {
            psi[i]
        } else if i == others[j - 1] {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    gram_schmidt_columns(&m)
}

/// `𝒬 = −𝒱 S₀ 𝒱† S_χ` with `S₀ = 𝕀 − 2|0⟩⟨0|` and `S_χ = 𝕀 − 2Π_good`.
pub fn grover_operator(v: &CMatrix) -> Result<CMatrix> {
    let d = v.rows();
    check_dim(d)?;
    if !v.is_unitary(1e-10) {
        return Err(crate::Error::NotUnitary(v.unitarity_error()));
    }
    let sign = |flip: bool| C::new(if flip { -1.0 } else { 1.0 }, 0.0);
    let s0 = CMatrix::diagonal(&(0..d).map(|k| sign(k == 0)).collect::<Vec<_>>());
    let s_chi = CMatrix::diagonal(&(0..d).map(|k| sign(k >= d / 2)).collect::<Vec<_>>());
    Ok(-&v.matmul(&s0).matmul(&v.adjoint()).matmul(&s_chi))
}

/// Probability mass on the good half of the basis.
pub fn good_probability(state: &[Complex]) -> f64 {
    state[state.len() / 2..].iter().map(|z| z.norm_sqr()).sum()
}

/// Good-state probability of `𝒬^m 𝒱|0⟩`.
pub fn amplified_good_probability(v: &CMatrix, m: u64) -> Result<f64> {
    let q = grover_operator(v)?;
    let mut state: Vec<Complex> = (0..v.rows()).map(|i| v[(i, 0)]).collect();
    for _ in 0..m {
        state = q.mul_vec(&state);
    }
    Ok(good_probability(&state))
}
