//! Fixed gates and the Pauli basis rotations used before parity readout.

use num_traits::One;

use super::matrix::ComplexMatrix;
use super::pauli::{Pauli, PauliString};
use super::scalar::{c, Real, C};
use crate::error::{Error, Result};

pub fn hadamard<T: Real>() -> ComplexMatrix<T> {
    let h = T::one() / T::lit(2.0).sqrt();
    ComplexMatrix::from_vec(2, 2, vec![c(h, T::zero()), c(h, T::zero()), c(h, T::zero()), c(-h, T::zero())]).expect("2x2")
}

/// Phase gate `diag(1, i)`.
pub fn s_gate<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::diagonal(&[C::one(), c(T::zero(), T::one())])
}

pub fn s_dagger<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::diagonal(&[C::one(), c(T::zero(), -T::one())])
}

/// Embeds a single-qubit gate on `qubit` of an `n`-qubit register.
pub fn on_qubit<T: Real>(n: usize, qubit: usize, g: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::identity(1);
    for q in 0..n {
        m = if q == qubit { m.kron(g) } else { m.kron(&ComplexMatrix::identity(2)) };
    }
    m
}

/// CNOT as a basis permutation.
pub fn cnot<T: Real>(n: usize, control: usize, target: usize) -> ComplexMatrix<T> {
    assert!(control != target && control < n && target < n);
    let d = 1usize << n;
    let (cb, tb) = (1usize << (n - 1 - control), 1usize << (n - 1 - target));
    let mut m = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let out = if j & cb != 0 { j ^ tb } else { j };
        m[(out, j)] = C::one();
    }
    m
}

/// Rotation `U` with `U† (Z⊗…⊗Z) U = sign · P`.
#[derive(Clone, Debug)]
pub struct BasisRotation<T: Real> {
    pub unitary: ComplexMatrix<T>,
    pub sign: i8,
}

/// Per-letter conjugation (`H` for X, `H·S†` for Y) followed by CNOTs that
/// remove identity positions from the parity: each identity qubit controls a
/// CNOT onto the first non-identity qubit.
pub fn basis_rotation_for<T: Real>(p: &PauliString) -> Result<BasisRotation<T>> {
    if p.is_identity() {
        return Err(Error::InvalidInput("identity string has constant expectation; no rotation defined".into()));
    }
    let n = p.n();
    let mut local = ComplexMatrix::identity(1);
    for &l in p.letters() {
        let g = match l {
            Pauli::X => hadamard(),
            Pauli::Y => hadamard().matmul(&s_dagger()),
            Pauli::I | Pauli::Z => ComplexMatrix::identity(2),
        };
        local = local.kron(&g);
    }
    let anchor = p.letters().iter().position(|&l| l != Pauli::I).expect("non-identity");
    let mut u = local;
    for (q, &l) in p.letters().iter().enumerate() {
        if l == Pauli::I {
            u = cnot(n, q, anchor).matmul(&u);
        }
    }
    Ok(BasisRotation { unitary: u, sign: 1 })
}

/// Diagonal of `Z⊗…⊗Z` as `(−1)^{popcount(j)}`.
pub fn parity_sign(j: usize) -> i8 {
    if j.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}
