//! Estimators for quantum observables and their variances, amplitude-estimation
//! query models, gradient constructions and random-matrix truncation-error theory,
//! all on dense simulations at desk scale.

pub mod error;
pub mod amplification;
pub mod estimators;
pub mod gradients;
pub mod qcore;
pub mod randmat;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Double-precision aliases used by the statistical layers.
pub type CMatrix = qcore::ComplexMatrix<f64>;
pub type State = qcore::QuantumState<f64>;
pub type Obs = qcore::Observable<f64>;
pub type Circuit = qcore::ParametricCircuit<f64>;
pub type Complex = qcore::C<f64>;
