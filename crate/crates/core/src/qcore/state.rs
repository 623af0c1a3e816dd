use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{hermitian_eigenvalues, psd_factor};
use super::matrix::ComplexMatrix;
use super::observable::Observable;
use super::pauli::PauliString;
use super::scalar::{c, Real, C};
use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum StateRepr<T: Real> {
    Pure(Vec<C<T>>),
    Mixed(ComplexMatrix<T>),
}

/// Dense `n`-qubit state, pure or mixed.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState<T: Real> {
    n: usize,
    repr: StateRepr<T>,
}

fn qubits_for(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

impl<T: Real> QuantumState<T> {
    pub fn from_statevector(psi: Vec<C<T>>) -> Result<Self> {
        let n = qubits_for(psi.len())?;
        let norm: T = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - T::one()).abs().to_f64_lossy() > STATE_TOL {
            return Err(Error::InvalidState(format!("statevector norm² is {norm}")));
        }
        Ok(Self { n, repr: StateRepr::Pure(psi) })
    }

    /// Rescales `psi` to unit norm before validating.
    pub fn from_unnormalized(psi: Vec<C<T>>) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm.is_zero() || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Self::from_statevector(psi.into_iter().map(|z| z / c(norm, T::zero())).collect())
    }

    pub fn from_density(rho: ComplexMatrix<T>) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::DimensionMismatch { expected: rho.rows(), found: rho.cols() });
        }
        let n = qubits_for(rho.rows())?;
        let herm = rho.hermiticity_error().to_f64_lossy();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("density matrix not hermitian ({herm:.2e})")));
        }
        let tr = rho.trace();
        if (tr.re - T::one()).abs().to_f64_lossy() > STATE_TOL || tr.im.abs().to_f64_lossy() > STATE_TOL {
            return Err(Error::InvalidState(format!("density matrix trace is {tr}")));
        }
        let ev = hermitian_eigenvalues(&rho.cast::<f64>())?;
        if ev[0] < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", ev[0])));
        }
        Ok(Self { n, repr: StateRepr::Mixed(rho) })
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut psi = vec![C::zero(); 1 << n];
        psi[index] = C::one();
        Self { n, repr: StateRepr::Pure(psi) }
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// `𝕀/d`.
    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        let rho = ComplexMatrix::identity(d).scale_real(T::one() / T::lit(d as f64));
        Self { n, repr: StateRepr::Mixed(rho) }
    }

    /// `|φ⁺⟩ = d^{-1/2} Σ_i |i⟩|i⟩` on `2n` qubits; either half is maximally mixed.
    pub fn bell_pairs(n: usize) -> Self {
        let d = 1usize << n;
        let amp = c(T::one() / T::lit(d as f64).sqrt(), T::zero());
        let mut psi = vec![C::zero(); d * d];
        for i in 0..d {
            psi[i * d + i] = amp;
        }
        Self { n: 2 * n, repr: StateRepr::Pure(psi) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn repr(&self) -> &StateRepr<T> {
        &self.repr
    }

    pub fn is_pure_repr(&self) -> bool {
        matches!(self.repr, StateRepr::Pure(_))
    }

    pub fn statevector(&self) -> Option<&[C<T>]> {
        match &self.repr {
            StateRepr::Pure(psi) => Some(psi),
            StateRepr::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> ComplexMatrix<T> {
        match &self.repr {
            StateRepr::Pure(psi) => {
                let d = psi.len();
                ComplexMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj())
            }
            StateRepr::Mixed(rho) => rho.clone(),
        }
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.rows() });
        }
        let repr = match &self.repr {
            StateRepr::Pure(psi) => StateRepr::Pure(u.mul_vec(psi)),
            StateRepr::Mixed(rho) => StateRepr::Mixed(rho.conjugate_by(u)),
        };
        Ok(Self { n: self.n, repr })
    }

    /// Born probabilities of the computational basis.
    pub fn probabilities(&self) -> Vec<T> {
        match &self.repr {
            StateRepr::Pure(psi) => psi.iter().map(|z| z.norm_sqr()).collect(),
            StateRepr::Mixed(rho) => (0..rho.rows()).map(|i| rho[(i, i)].re.max(T::zero())).collect(),
        }
    }

    /// `Tr(ρ M)` for an arbitrary operator.
    pub fn expectation(&self, m: &ComplexMatrix<T>) -> Result<C<T>> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.rows() });
        }
        Ok(match &self.repr {
            StateRepr::Pure(psi) => {
                let mpsi = m.mul_vec(psi);
                psi.iter().zip(&mpsi).fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
            }
            StateRepr::Mixed(rho) => rho.trace_product(m),
        })
    }

    /// Traces out the trailing `n − keep` qubits.
    pub fn reduced_leading(&self, keep: usize) -> Result<ComplexMatrix<T>> {
        if keep > self.n {
            return Err(Error::InvalidInput(format!("cannot keep {keep} of {} qubits", self.n)));
        }
        let (da, db) = (1usize << keep, 1usize << (self.n - keep));
        let rho = self.density_matrix();
        Ok(ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).fold(C::zero(), |acc, k| acc + rho[(i * db + k, j * db + k)])
        }))
    }

    /// Purification on `2n` qubits whose leading half reduces to this state.
    pub fn purify(&self) -> Result<Self> {
        let d = self.dim();
        let rho = self.density_matrix();
        let l = psd_factor(&rho, T::lit(1e-14))?;
        let mut psi = vec![C::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                psi[i * d + k] = l[(i, k)];
            }
        }
        Self::from_unnormalized(psi)
    }

    pub fn to_json(&self) -> String {
        let pair = |z: &C<T>| [z.re.to_f64_lossy(), z.im.to_f64_lossy()];
        match &self.repr {
            StateRepr::Pure(psi) => serde_json::to_string(&psi.iter().map(pair).collect::<Vec<_>>()),
            StateRepr::Mixed(rho) => serde_json::to_string(
                &(0..rho.rows()).map(|i| (0..rho.cols()).map(|j| pair(&rho[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>(),
            ),
        }
        .expect("serializable")
    }

    /// Accepts a flat array of `[re, im]` pairs (statevector) or an array of rows of pairs (density matrix).
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize, Serialize)]
        #[serde(untagged)]
        enum Shape {
            Vector(Vec<[f64; 2]>),
            Matrix(Vec<Vec<[f64; 2]>>),
        }
        let shape: Shape = serde_json::from_str(text).map_err(|e| Error::InvalidState(format!("state JSON: {e}")))?;
        let cv = |p: &[f64; 2]| c(T::lit(p[0]), T::lit(p[1]));
        match shape {
            Shape::Vector(v) => Self::from_statevector(v.iter().map(cv).collect()),
            Shape::Matrix(rows) => {
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(Error::InvalidState("density matrix JSON is not square".into()));
                }
                let data: Vec<C<T>> = rows.iter().flat_map(|r| r.iter().map(cv)).collect();
                Self::from_density(ComplexMatrix::from_vec(d, d, data)?)
            }
        }
    }
}

/// `Tr(ρ P)`.
pub fn pauli_expectation<T: Real>(state: &QuantumState<T>, p: &PauliString) -> Result<T> {
    if p.n() != state.n() {
        return Err(Error::DimensionMismatch { expected: state.n(), found: p.n() });
    }
    let (flip, phase, ny) = p.masks();
    let global = super::pauli::i_pow::<T>(ny);
    let sign = |j: usize| if (j & phase).count_ones() % 2 == 1 { -T::one() } else { T::one() };
    let v: C<T> = match state.repr() {
        StateRepr::Pure(psi) => psi
            .iter()
            .enumerate()
            .fold(C::zero(), |acc, (j, &a)| acc + psi[j ^ flip].conj() * a * c(sign(j), T::zero())),
        StateRepr::Mixed(rho) => (0..rho.rows()).fold(C::zero(), |acc, j| acc + rho[(j, j ^ flip)] * c(sign(j), T::zero())),
    };
    Ok((v * global).re)
}

/// `Tr(ρ 𝒪) = Σ a_i Tr(ρ P_i)`.
pub fn observable_expectation<T: Real>(state: &QuantumState<T>, obs: &Observable<T>) -> Result<T> {
    obs.terms().iter().try_fold(T::zero(), |acc, (a, p)| Ok(acc + *a * pauli_expectation(state, p)?))
}
