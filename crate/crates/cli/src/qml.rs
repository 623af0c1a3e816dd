//! Variance of the classifier cost `C₁ = 1 − (1/L) Σ_i y_i f(θ, x_i)` under
//! the standard and LCU estimators.
//!
//! Each term is the parity `f(θ, x) = ⟨0|Φ(x)† W(θ)† Z_prod W(θ) Φ(x)|0⟩`.
//! The estimated sum is the non-renormalized `S = Σ_i y_i f_i`, so
//! `Var S` grows like `L` for SE and like `L²` for LCU; `C₁ = 1 − S/L`.

use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use qvar::estimators::{lcu_estimate, se_estimate, variance_ordering, EstimateReport, Problem, Shots};
use qvar::qcore::gates::{cnot, hadamard, on_qubit};
use qvar::qcore::linalg::exp_i_hermitian;
use qvar::qcore::sampling::mean_and_variance;
use qvar::qcore::{Measurement, Pauli, PauliString, RngStream};
use qvar::{CMatrix, Circuit, State};
use rand::Rng;

use crate::config::QmlParams;
use crate::dataset::Dataset;
use crate::error::{CliError, Result};

/// `exp(−i[Σ_j x_j Z_j + Σ_{j<k} (π − x_j)(π − x_k) Z_j Z_k]) H^{⊗n}`.
pub fn feature_map(x: &[f64]) -> CMatrix {
    let n = x.len();
    let pi = std::f64::consts::PI;
    let z = |j: usize| PauliString::single(n, j, Pauli::Z).matrix::<f64>();
    let mut phase = CMatrix::zeros(1 << n, 1 << n);
    for j in 0..n {
        phase = &phase + &z(j).scale_real(x[j]);
        for k in j + 1..n {
            phase = &phase + &z(j).matmul(&z(k)).scale_real((pi - x[j]) * (pi - x[k]));
        }
    }
    let h = (0..n).fold(CMatrix::identity(1 << n), |acc, q| on_qubit(n, q, &hadamard()).matmul(&acc));
    exp_i_hermitian(&phase, 1.0).matmul(&h)
}

/// `layers` repetitions of `Y` rotations, a CNOT ring and `Z` rotations;
/// `2n` parameters per layer.
pub fn ansatz(n: usize, layers: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    let mut p = 0;
    for _ in 0..layers {
        for q in 0..n {
            c.push_pauli_rotation(&PauliString::single(n, q, Pauli::Y), p)?;
            p += 1;
        }
        if n > 1 {
            for q in 0..n {
                if n == 2 && q == 1 {
                    break;
                }
                c.push_fixed(cnot(n, q, (q + 1) % n))?;
            }
        }
        for q in 0..n {
            c.push_pauli_rotation(&PauliString::single(n, q, Pauli::Z), p)?;
            p += 1;
        }
    }
    Ok(c)
}

/// `S = Σ_{i<L} y_i f(θ, x_i)` with `U_i = W(θ) Φ(x_i)` on `|0…0⟩`.
pub fn qml_problem(dataset: &Dataset, l: usize, w: &CMatrix) -> Result<Problem> {
    if l > dataset.len() {
        return Err(CliError::Config(format!("dataset has {} points, fewer than L = {l}", dataset.len())));
    }
    let n = dataset.width();
    let coeffs: Vec<f64> = dataset.labels[..l].iter().map(|&y| f64::from(y)).collect();
    let us: Vec<CMatrix> = dataset.inputs[..l].iter().map(|x| w.matmul(&feature_map(x))).collect();
    Ok(Problem::from_unitaries(&coeffs, &us, &State::zero(n), Measurement::ZProd)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QmlRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub estimator: &'static str,
    pub shots: usize,
    /// Mean of `S` over repetitions.
    pub mean: Option<f64>,
    /// `1 − mean/L`.
    pub cost: Option<f64>,
    pub analytic_var: f64,
    /// Shot-level variance estimate, averaged over repetitions.
    pub empirical_var: Option<f64>,
    /// Sample variance of the repetition means.
    pub replica_var: Option<f64>,
}

impl QmlRow {
    pub const CSV_HEADER: [&'static str; 8] = ["L", "estimator", "shots", "mean", "cost", "analytic_var", "empirical_var", "replica_var"];
}

fn validate(params: &QmlParams, dataset: &Dataset) -> Result<()> {
    if params.n_qubits == 0 || params.n_qubits > 6 {
        return Err(CliError::Config("params.n_qubits: must be 1 to 6".into()));
    }
    if dataset.width() != params.n_qubits {
        return Err(CliError::Config(format!("dataset has {} features but n_qubits is {}", dataset.width(), params.n_qubits)));
    }
    if params.l_values.is_empty() || params.l_values.contains(&0) {
        return Err(CliError::Config("params.l_values: need at least one L ≥ 1".into()));
    }
    if let Some(&l) = params.l_values.iter().find(|&&l| l > dataset.len()) {
        return Err(CliError::Config(format!("dataset has {} points, fewer than L = {l}", dataset.len())));
    }
    if params.shots == 0 {
        return Err(CliError::Config("params.shots: must be ≥ 1".into()));
    }
    if params.repetitions < 2 {
        return Err(CliError::Config("params.repetitions: must be ≥ 2".into()));
    }
    if params.layers == 0 {
        return Err(CliError::Config("params.layers: must be ≥ 1".into()));
    }
    Ok(())
}

/// `W(θ)` with `θ ∼ 𝒩(0, 𝕀)` drawn from stream `(seed, 1)`.
pub fn qml_unitary(params: &QmlParams, seed: u64) -> Result<CMatrix> {
    let circuit = ansatz(params.n_qubits, params.layers)?;
    let mut rng = RngStream::new(seed, 1).rng();
    let theta: Vec<f64> = (0..circuit.n_params()).map(|_| rng.sample(StandardNormal)).collect();
    Ok(circuit.evaluate(&theta)?)
}

/// Rows for SE, LCU and the classical maximum at every `L`. Repetition `r`
/// at sweep point `j` samples from `(seed, 2).child(j).child(r)`.
pub fn qml_cost_experiment(params: &QmlParams, dataset: &Dataset, seed: u64) -> Result<Vec<QmlRow>> {
    validate(params, dataset)?;
    let w = qml_unitary(params, seed)?;
    let shots = Shots::Finite(params.shots);
    let base = RngStream::new(seed, 2);

    let mut rows = Vec::with_capacity(3 * params.l_values.len());
    for (j, &l) in params.l_values.iter().enumerate() {
        let problem = qml_problem(dataset, l, &w)?;
        let unsigned = problem.absorb_signs()?;
        let reports: Vec<(EstimateReport, EstimateReport)> = (0..params.repetitions)
            .into_par_iter()
            .map(|r| {
                let s = base.child(j as u64).child(r as u64);
                Ok((se_estimate(&problem, &shots, &s.child(0))?, lcu_estimate(&unsigned, &shots, &s.child(1))?))
            })
            .collect::<Result<_>>()?;
        for (label, pick) in [("SE", 0usize), ("LCU", 1)] {
            let rs: Vec<&EstimateReport> = reports.iter().map(|p| if pick == 0 { &p.0 } else { &p.1 }).collect();
            let means: Vec<f64> = rs.iter().map(|r| r.mean).collect();
            let (mean, replica) = mean_and_variance(&means);
            let emp = rs.iter().map(|r| r.empirical_variance).sum::<f64>() / rs.len() as f64;
            rows.push(QmlRow {
                l,
                estimator: label,
                shots: params.shots,
                mean: Some(mean),
                cost: Some(1.0 - mean / l as f64),
                analytic_var: rs[0].analytic_variance,
                empirical_var: Some(emp),
                replica_var: Some(replica),
            });
        }
        let ordering = variance_ordering(&problem.coefficients(), &problem.term_means())?;
        rows.push(QmlRow {
            l,
            estimator: "CLASSICAL_MAX",
            shots: params.shots,
            mean: None,
            cost: None,
            analytic_var: ordering.classical_max / params.shots as f64,
            empirical_var: None,
            replica_var: None,
        });
    }
    Ok(rows)
}
