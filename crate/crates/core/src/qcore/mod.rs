//! Dense linear algebra, Pauli algebra, states, parametric circuits and seeded sampling.
//!
//! Basis convention: qubit 0 is the most significant bit of a basis index, so
//! `|q0 q1 … q_{n−1}⟩` has index `Σ q_k 2^{n−1−k}`.

pub mod circuit;
pub mod gates;
pub mod linalg;
pub mod matrix;
pub mod observable;
pub mod pauli;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod state;

pub use circuit::{CircuitOp, ParametricCircuit};
pub use gates::{basis_rotation_for, BasisRotation};
pub use matrix::ComplexMatrix;
pub use observable::Observable;
pub use pauli::{Pauli, PauliString};
pub use rng::RngStream;
pub use sampling::{haar_unitary, sample_measurement, Measurement};
pub use scalar::{Real, C};
pub use state::{observable_expectation, pauli_expectation, QuantumState, StateRepr};
