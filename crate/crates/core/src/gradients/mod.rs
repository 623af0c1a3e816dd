//! Gradient constructions for parametrized unitaries.
//!
//! Every method has an exact mode that is checked against
//! [`frechet_gradient_oracle`], which differentiates `exp(−iH)` through the
//! block-triangular exponential and shares no code path with the methods.
//!
//! Sign convention: for `V = exp(−i Σ θ_k H_k)`,
//! `∂V/∂θ_k = Σ_l (−i)^{l+1}/(l+1)! ad_H^l(H_k) V`.

mod coherent;
mod costs;
mod forward;
mod gate;
mod grape;
mod oracle;
mod shift;
mod sun;

pub use coherent::{coherent_lcu_weights, sun_lcu_estimate, CoherentEstimate, CoherentWeights};
pub use costs::{infidelity, potq_cost, CostSpec, PotqCost};
pub use forward::{forward_derivative, forward_gradient, Directions};
pub use gate::MultiParamGate;
pub use grape::{grape_gradient, ControlProblem, GrapeMode, Pulse};
pub use oracle::{circuit_frechet_gradient, circuit_unitary_gradient, frechet_gradient_oracle};
pub use shift::{parameter_shift_gradient, ShiftRule};
pub use sun::{sun_gradient, sun_series_term, SunGradient};

/// Row of a gradient-error study.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GradientRow {
    pub method: String,
    pub d: usize,
    pub l: usize,
    pub theta_norm: f64,
    pub seed: u64,
    pub sq_error: f64,
}

impl GradientRow {
    pub const CSV_HEADER: &'static str = "method,d,L,theta_norm,seed,sq_error";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{}", self.method, self.d, self.l, self.theta_norm, self.seed, self.sq_error)
    }
}
