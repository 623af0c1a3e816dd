use super::linalg::exp_i_hermitian;
use super::matrix::ComplexMatrix;
use super::pauli::PauliString;
use super::scalar::{c, Real};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum CircuitOp<T: Real> {
    Fixed(ComplexMatrix<T>),
    /// `exp(−iθ_param · generator)`.
    Rotation { generator: ComplexMatrix<T>, param: usize, involutory: bool },
}

/// Ordered product ansatz `V(θ) = G_N ⋯ G_1`; op 0 acts first.
#[derive(Clone, Debug)]
pub struct ParametricCircuit<T: Real> {
    n: usize,
    ops: Vec<CircuitOp<T>>,
    n_params: usize,
}

impl<T: Real> ParametricCircuit<T> {
    pub fn new(n: usize) -> Self {
        Self { n, ops: Vec::new(), n_params: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn ops(&self) -> &[CircuitOp<T>] {
        &self.ops
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    fn check_dim(&self, m: &ComplexMatrix<T>) -> Result<()> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.rows() });
        }
        Ok(())
    }

    pub fn push_fixed(&mut self, u: ComplexMatrix<T>) -> Result<&mut Self> {
        self.check_dim(&u)?;
        let err = u.unitarity_error().to_f64_lossy();
        if err > 1e-10 {
            return Err(Error::NotUnitary(err));
        }
        self.ops.push(CircuitOp::Fixed(u));
        Ok(self)
    }

    pub fn push_rotation(&mut self, generator: ComplexMatrix<T>, param: usize) -> Result<&mut Self> {
        self.check_dim(&generator)?;
        let herm = generator.hermiticity_error().to_f64_lossy();
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        let sq = generator.matmul(&generator);
        let involutory = sq.max_abs_diff(&ComplexMatrix::identity(self.dim())).to_f64_lossy() < 1e-12;
        self.ops.push(CircuitOp::Rotation { generator, param, involutory });
        self.n_params = self.n_params.max(param + 1);
        Ok(self)
    }

    pub fn push_pauli_rotation(&mut self, p: &PauliString, param: usize) -> Result<&mut Self> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.n() });
        }
        self.push_rotation(p.matrix(), param)
    }

    /// Unitary of op `k` at rotation angle `angle` (ignored for fixed ops).
    pub fn op_unitary(&self, k: usize, angle: T) -> ComplexMatrix<T> {
        match &self.ops[k] {
            CircuitOp::Fixed(u) => u.clone(),
            CircuitOp::Rotation { generator, involutory: true, .. } => {
                let id = ComplexMatrix::identity(self.dim()).scale_real(angle.cos());
                &id + &generator.scale(c(T::zero(), -angle.sin()))
            }
            CircuitOp::Rotation { generator, .. } => exp_i_hermitian(generator, angle),
        }
    }

    fn angle(&self, k: usize, theta: &[T]) -> T {
        match &self.ops[k] {
            CircuitOp::Rotation { param, .. } => theta[*param],
            CircuitOp::Fixed(_) => T::zero(),
        }
    }

    fn check_theta(&self, theta: &[T]) -> Result<()> {
        if theta.len() < self.n_params {
            return Err(Error::DimensionMismatch { expected: self.n_params, found: theta.len() });
        }
        Ok(())
    }

    /// Per-op unitaries at `θ`, with an optional extra angle added to a single op.
    pub fn bound_ops(&self, theta: &[T], shift: Option<(usize, T)>) -> Result<Vec<ComplexMatrix<T>>> {
        self.check_theta(theta)?;
        Ok((0..self.ops.len())
            .map(|k| {
                let mut a = self.angle(k, theta);
                if let Some((j, s)) = shift {
                    if j == k {
                        a += s;
                    }
                }
                self.op_unitary(k, a)
            })
            .collect())
    }

    pub fn evaluate(&self, theta: &[T]) -> Result<ComplexMatrix<T>> {
        self.evaluate_shifted(theta, None)
    }

    pub fn evaluate_shifted(&self, theta: &[T], shift: Option<(usize, T)>) -> Result<ComplexMatrix<T>> {
        let mats = self.bound_ops(theta, shift)?;
        Ok(mats.iter().fold(ComplexMatrix::identity(self.dim()), |acc, g| g.matmul(&acc)))
    }

    /// Indices of rotation ops driven by parameter `p`.
    pub fn ops_for_param(&self, p: usize) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter_map(|(k, op)| match op {
                CircuitOp::Rotation { param, .. } if *param == p => Some(k),
                _ => None,
            })
            .collect()
    }

    pub fn generator(&self, k: usize) -> Option<&ComplexMatrix<T>> {
        match &self.ops[k] {
            CircuitOp::Rotation { generator, .. } => Some(generator),
            CircuitOp::Fixed(_) => None,
        }
    }
}
