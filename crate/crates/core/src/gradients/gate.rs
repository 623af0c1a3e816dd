use crate::error::{invalid, Error, Result};
use crate::qcore::linalg::{expm, expm_frechet};
use crate::qcore::C;
use crate::CMatrix;

/// `V(θ) = exp(−i Σ_k θ_k H_k)`.
#[derive(Clone, Debug)]
pub struct MultiParamGate {
    generators: Vec<CMatrix>,
    theta: Vec<f64>,
}

impl MultiParamGate {
    pub fn new(generators: Vec<CMatrix>, theta: Vec<f64>) -> Result<Self> {
        if generators.is_empty() {
            return invalid("gate needs at least one generator");
        }
        if generators.len() != theta.len() {
            return Err(Error::DimensionMismatch { expected: generators.len(), found: theta.len() });
        }
        let d = generators[0].rows();
        for h in &generators {
            if h.rows() != d || !h.is_square() {
                return Err(Error::DimensionMismatch { expected: d, found: h.rows() });
            }
            let err = h.hermiticity_error();
            if err > 1e-10 {
                return Err(Error::NotHermitian(err));
            }
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return invalid("θ must be finite");
        }
        Ok(Self { generators, theta })
    }

    pub fn dim(&self) -> usize {
        self.generators[0].rows()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        Self::new(self.generators.clone(), theta)
    }

    /// `‖θ‖₁ = Σ|θ_k|`.
    pub fn one_norm(&self) -> f64 {
        self.theta.iter().map(|t| t.abs()).sum()
    }

    /// `H(θ) = Σ θ_k H_k`.
    pub fn hamiltonian(&self) -> CMatrix {
        self.generators
            .iter()
            .zip(&self.theta)
            .fold(CMatrix::zeros(self.dim(), self.dim()), |acc, (h, &t)| &acc + &h.scale_real(t))
    }

    pub fn evaluate(&self) -> CMatrix {
        expm(&self.hamiltonian().scale(C::new(0.0, -1.0)))
    }

    /// `(V, ∂V/∂θ_k)` from the block exponential `exp([[−iH, −iH_k], [0, −iH]])`.
    pub fn derivative(&self, k: usize) -> (CMatrix, CMatrix) {
        let mi = C::new(0.0, -1.0);
        expm_frechet(&self.hamiltonian().scale(mi), &self.generators[k].scale(mi))
    }
}
