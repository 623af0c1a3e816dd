use rand::Rng;

use crate::error::{invalid, Result};
use crate::qcore::RngStream;

use super::{EstimateReport, EstimatorKind, Moments, Problem, Shots};

struct Cdf(Vec<f64>);

impl Cdf {
    fn new(p: &[f64]) -> Self {
        let total: f64 = p.iter().sum();
        let mut acc = 0.0;
        Self(p.iter().map(|x| {
            acc += x / total;
            acc
        })
        .collect())
    }

    fn draw(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        self.0.partition_point(|&v| v <= u).min(self.0.len() - 1)
    }
}

/// Single-ancilla LCU: each of `n_unitaries` draws picks term `i ∼ w` and runs
/// `shots_per_draw` shots of circuit `i`; the estimate is `offset + ‖a‖₁·x̄`.
///
/// By the law of total variance the analytic variance is
/// `‖a‖₁² (E_w[σ_i²]/n + Var_w(μ_i)) / N_U`, which for one shot per draw is the
/// full-LCU value `‖a‖₁² μ̄(1 − μ̄)/N_U` (projector) or `‖a‖₁²(1 − m̄²)/N_U`
/// (parity). `unitary_variance` carries `Σ w_i μ_i² − μ̄²` in readout units.
/// In exact mode the analytic variance is that of one draw with one shot.
pub fn sa_lcu_estimate(problem: &Problem, n_unitaries: usize, shots: &Shots, stream: &RngStream) -> Result<EstimateReport> {
    if n_unitaries == 0 {
        return invalid("N_U must be ≥ 1");
    }
    if problem.is_empty() {
        return invalid("SA-LCU needs at least one term");
    }
    if problem.coefficients().iter().any(|&a| a < 0.0) {
        return invalid("SA-LCU weights must be nonnegative");
    }
    let per_draw = shots.single()?;
    let w = problem.weights()?;
    let mu = problem.term_means();
    let sigma2 = problem.term_variances();
    let mbar: f64 = w.w.iter().zip(&mu).map(|(a, b)| a * b).sum();
    let var_u: f64 = (w.w.iter().zip(&mu).map(|(a, b)| a * b * b).sum::<f64>() - mbar * mbar).max(0.0);
    let e_sigma: f64 = w.w.iter().zip(&sigma2).map(|(a, b)| a * b).sum();
    let norm2 = w.one_norm * w.one_norm;

    let mut report = EstimateReport::new(EstimatorKind::SaLcu, stream.seed);
    report.unitary_variance = Some(var_u);
    let Some(n) = per_draw else {
        report.mean = problem.exact_value();
        report.analytic_variance = norm2 * (e_sigma + var_u);
        report.circuits_used = problem.len();
        return Ok(report);
    };
    let pick = Cdf::new(&w.w);
    let outcome: Vec<Cdf> = (0..problem.len()).map(|i| Cdf::new(problem.term_probabilities(i))).collect();
    let mut rng = stream.rng();
    let mut draws = Moments::default();
    let mut used = vec![false; problem.len()];
    for _ in 0..n_unitaries {
        let i = pick.draw(&mut rng);
        used[i] = true;
        let total: f64 = (0..n).map(|_| problem.value(outcome[i].draw(&mut rng))).sum();
        draws.push(total / n as f64);
    }
    let nu = n_unitaries as f64;
    report.mean = problem.offset() + w.one_norm * draws.mean();
    report.analytic_variance = norm2 * (e_sigma / n as f64 + var_u) / nu;
    report.empirical_variance = norm2 * draws.variance() / nu;
    report.shots_total = (n_unitaries * n) as u64;
    report.circuits_used = used.iter().filter(|&&u| u).count();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{lcu_estimate, se_estimate};
    use crate::qcore::linalg::exp_i_hermitian;
    use crate::qcore::{Measurement, Pauli};
    use crate::{CMatrix, State};

    /// Rotations of |0⟩ with projector readout onto |1⟩ giving the requested p_i.
    fn bernoulli_problem(a: &[f64], p: &[f64]) -> Problem {
        let us: Vec<CMatrix> = p.iter().map(|&pi| exp_i_hermitian(&Pauli::Y.matrix(), pi.sqrt().asin())).collect();
        Problem::from_unitaries(a, &us, &State::zero(1), Measurement::Projector(vec![false, true])).unwrap()
    }

    #[test]
    fn two_point_moments() {
        let prob = bernoulli_problem(&[1.0, 1.0], &[0.2, 0.8]);
        let r = sa_lcu_estimate(&prob, 10, &Shots::Finite(1), &RngStream::new(0, 0)).unwrap();
        assert!((r.unitary_variance.unwrap() - 0.09).abs() < 1e-12);
        // ‖a‖₁² = 4; single-shot total variance is p̄(1 − p̄) = 0.25.
        assert!((r.analytic_variance * 10.0 / 4.0 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn single_shot_matches_full_lcu() {
        let prob = bernoulli_problem(&[0.3, 0.5, 0.2], &[0.1, 0.6, 0.9]);
        let sa = sa_lcu_estimate(&prob, 1, &Shots::Finite(1), &RngStream::new(0, 0)).unwrap();
        let lcu = lcu_estimate(&prob, &Shots::Finite(1), &RngStream::new(0, 0)).unwrap();
        assert!((sa.analytic_variance - lcu.analytic_variance).abs() < 1e-12);
    }

    #[test]
    fn point_mass_reduces_to_one_term() {
        let prob = bernoulli_problem(&[0.0, 2.0], &[0.5, 0.3]);
        let sa = sa_lcu_estimate(&prob, 40, &Shots::Finite(25), &RngStream::new(7, 0)).unwrap();
        let se = se_estimate(&prob, &Shots::Finite(1000), &RngStream::new(7, 0)).unwrap();
        assert!((sa.analytic_variance - se.analytic_variance).abs() < 1e-12);
        assert_eq!(sa.unitary_variance, Some(0.0));
    }

    #[test]
    fn empirical_single_shot_variance_matches() {
        let prob = bernoulli_problem(&[0.5, 0.5], &[0.2, 0.8]);
        let r = sa_lcu_estimate(&prob, 100_000, &Shots::Finite(1), &RngStream::new(8, 0)).unwrap();
        assert!((r.empirical_variance / r.analytic_variance - 1.0).abs() < 0.05);
        assert!((r.mean - prob.exact_value()).abs() < 5.0 * r.analytic_variance.sqrt());
    }

    #[test]
    fn repetition_variance_with_several_shots_per_draw() {
        let prob = bernoulli_problem(&[0.4, 0.6], &[0.15, 0.7]);
        let reps = 4000;
        let means: Vec<f64> = (0..reps)
            .map(|r| sa_lcu_estimate(&prob, 20, &Shots::Finite(5), &RngStream::for_batch(9, 0, r)).unwrap().mean)
            .collect();
        let (m, v) = crate::qcore::sampling::mean_and_variance(&means);
        let analytic = sa_lcu_estimate(&prob, 20, &Shots::Finite(5), &RngStream::new(0, 0)).unwrap().analytic_variance;
        assert!((v / analytic - 1.0).abs() < 0.1);
        assert!((m - prob.exact_value()).abs() < 5.0 * (analytic / reps as f64).sqrt());
    }

    #[test]
    fn rejects_bad_inputs() {
        let prob = bernoulli_problem(&[1.0, -1.0], &[0.2, 0.8]);
        assert!(sa_lcu_estimate(&prob, 5, &Shots::Finite(1), &RngStream::new(0, 0)).is_err());
        let ok = bernoulli_problem(&[1.0], &[0.2]);
        assert!(sa_lcu_estimate(&ok, 0, &Shots::Finite(1), &RngStream::new(0, 0)).is_err());
    }
}
