use crate::error::{Error, Result};
use crate::qcore::gates::{hadamard, s_dagger};
use crate::qcore::{Real, RngStream};
use crate::{CMatrix, Complex, State};

use super::{sample_moments, EstimateReport, EstimatorKind, Shots};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dqc1Mode {
    /// One Hadamard test on the maximally mixed input.
    Mixed,
    /// One Hadamard test per computational basis state, averaged.
    BasisSweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TracePart {
    Real,
    Imag,
}

/// `H · [S†] · CU · H` on control ⊗ system, with the control as qubit 0.
pub fn hadamard_test_circuit(u: &CMatrix, part: TracePart) -> CMatrix {
    let d = u.rows();
    let id = CMatrix::identity(d);
    let mut cu = CMatrix::zeros(2 * d, 2 * d);
    cu.set_block(0, 0, &id);
    cu.set_block(d, d, u);
    let h = hadamard().kron(&id);
    let phase = match part {
        TracePart::Real => CMatrix::identity(2 * d),
        TracePart::Imag => s_dagger().kron(&id),
    };
    h.matmul(&phase).matmul(&cu).matmul(&h)
}

fn control_zero_probability(circuit: &CMatrix, input: &State) -> Result<f64> {
    let probs = input.evolve(circuit)?.probabilities();
    let d = probs.len() / 2;
    Ok(probs[..d].iter().map(|p| p.to_f64_lossy()).sum::<f64>().clamp(0.0, 1.0))
}

/// Trace estimation `Re Tr(U)/d` (or `Im`) by Hadamard tests.
///
/// Each shot records whether the control reads 0, so `p = ½(1 + t)` and the
/// estimator is `2x̄ − 1`. Mixed mode has variance `4p(1 − p)/n`; the basis
/// sweep runs `d` tests of `n` shots with variance `(4/d²)Σ p_i(1 − p_i)/n`,
/// which never exceeds the mixed-mode variance divided by `d` because
/// `p(1 − p)` is concave.
pub fn dqc1_trace(u: &CMatrix, mode: Dqc1Mode, shots: &Shots, stream: &RngStream, part: TracePart) -> Result<EstimateReport> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.rows(), found: u.cols() });
    }
    let err = u.unitarity_error();
    if err > 1e-10 {
        return Err(Error::NotUnitary(err));
    }
    let budget = shots.single()?;
    let d = u.rows();
    let n_sys = d.trailing_zeros() as usize;
    if !d.is_power_of_two() {
        return Err(Error::InvalidInput(format!("dimension {d} is not a power of two")));
    }
    let circuit = hadamard_test_circuit(u, part);
    let inputs: Vec<State> = match mode {
        Dqc1Mode::Mixed => {
            let mut rho = CMatrix::zeros(2 * d, 2 * d);
            for i in 0..d {
                rho[(i, i)] = Complex::from(1.0 / d as f64);
            }
            vec![State::from_density(rho)?]
        }
        Dqc1Mode::BasisSweep => (0..d).map(|i| State::basis(n_sys + 1, i)).collect(),
    };
    let p: Vec<f64> = inputs.iter().map(|s| control_zero_probability(&circuit, s)).collect::<Result<_>>()?;
    let k = p.len() as f64;
    let kind = match mode {
        Dqc1Mode::Mixed => EstimatorKind::Dqc1Mixed,
        Dqc1Mode::BasisSweep => EstimatorKind::Dqc1Basis,
    };
    let mut report = EstimateReport::new(kind, stream.seed);
    report.circuits_used = p.len();
    let single: f64 = p.iter().map(|q| 4.0 * q * (1.0 - q)).sum::<f64>() / (k * k);
    match budget {
        None => {
            report.mean = p.iter().map(|q| 2.0 * q - 1.0).sum::<f64>() / k;
            report.analytic_variance = single;
        }
        Some(n) => {
            let nf = n as f64;
            let (mut mean, mut emp) = (0.0, 0.0);
            for (i, &q) in p.iter().enumerate() {
                let m = sample_moments(&[q, 1.0 - q], n, &stream.child(i as u64), |x| if x == 0 { 1.0 } else { 0.0 })?;
                mean += 2.0 * m.mean() - 1.0;
                emp += 4.0 * m.variance() / nf;
            }
            report.mean = mean / k;
            report.analytic_variance = single / nf;
            report.empirical_variance = emp / (k * k);
            report.shots_total = (p.len() * n) as u64;
        }
    }
    Ok(report)
}
