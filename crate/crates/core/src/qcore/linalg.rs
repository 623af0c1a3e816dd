use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use super::scalar::{c, Real, C};
use crate::error::{Error, Result};

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// The argument is scaled until its 1-norm is at most 1/2, the series is summed
/// until terms fall below machine precision, and the result is squared back.
pub fn expm<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    assert!(a.is_square(), "expm of non-square matrix");
    let n = a.rows();
    let norm = a.one_norm();
    let half = T::lit(0.5);
    let mut s = 0i32;
    if norm > half {
        s = (norm / half).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scale = T::lit(2.0).powi(-s);
    let x = a.scale_real(scale);
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = term.matmul(&x).scale_real(T::one() / T::lit(k as f64));
        sum = &sum + &term;
        if term.max_abs() <= T::epsilon() * T::lit(0.5) * sum.max_abs() {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}

/// `exp(−i·t·H)` for a hermitian generator.
pub fn exp_i_hermitian<T: Real>(h: &ComplexMatrix<T>, t: T) -> ComplexMatrix<T> {
    expm(&h.scale(c(T::zero(), -t)))
}

/// Directional (Fréchet) derivative of the exponential at `a` along `e`,
/// read off the upper-right block of `exp([[a, e], [0, a]])`.
pub fn expm_frechet<T: Real>(a: &ComplexMatrix<T>, e: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = a.rows();
    let mut big = ComplexMatrix::zeros(2 * n, 2 * n);
    big.set_block(0, 0, a);
    big.set_block(0, n, e);
    big.set_block(n, n, a);
    let ex = expm(&big);
    (ex.block(0, 0, n, n), ex.block(0, n, n, n))
}

/// Orthonormalizes the columns of `m` (classical Gram–Schmidt, applied twice).
/// Returns `Q` with the same column span; `R` has a positive real diagonal.
pub fn gram_schmidt_columns<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q = m.clone();
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = C::<T>::zero();
                for i in 0..rows {
                    dot += q[(i, k)].conj() * q[(i, j)];
                }
                for i in 0..rows {
                    let v = q[(i, k)];
                    q[(i, j)] -= dot * v;
                }
            }
        }
        let norm = (0..rows).map(|i| q[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if norm <= T::epsilon() * T::lit(100.0) {
            return Err(Error::Numerical("rank-deficient matrix in Gram-Schmidt".into()));
        }
        for i in 0..rows {
            let v = q[(i, j)];
            q[(i, j)] = v / c(norm, T::zero());
        }
    }
    Ok(q)
}

/// Factor `L` with `L·L† = a` for a positive semidefinite hermitian matrix.
/// Columns whose pivot falls below `tol` are left at zero.
pub fn psd_factor<T: Real>(a: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    let mut work = a.clone();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let pivot = work[(j, j)].re;
        if pivot < -tol {
            return Err(Error::InvalidState(format!("negative pivot {pivot:?} in PSD factorization")));
        }
        if pivot <= tol {
            continue;
        }
        let root = pivot.sqrt();
        for i in j..n {
            l[(i, j)] = work[(i, j)] / c(root, T::zero());
        }
        for i in j..n {
            for k in j..n {
                let v = l[(i, j)] * l[(k, j)].conj();
                work[(i, k)] -= v;
            }
        }
    }
    Ok(l)
}

/// Eigenvalues of a hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &ComplexMatrix<f64>) -> Result<Vec<f64>> {
    if !h.is_hermitian(1e-9 * (1.0 + h.max_abs())) {
        return Err(Error::NotHermitian(h.hermiticity_error()));
    }
    let n = h.rows();
    let m = nalgebra::DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| h[(i, j)]);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(ev)
}
