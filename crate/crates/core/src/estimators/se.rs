use crate::error::{invalid, Error, Result};
use crate::qcore::RngStream;

use super::{sample_moments, EstimateReport, EstimatorKind, Problem, Shots};

/// Standard estimator: one circuit per term, `C̃ = offset + Σ a_i x̄_i`.
///
/// The analytic variance is `Σ a_i² σ_i²/n_i` with `σ_i² = 1 − m_i²` for a
/// parity readout and `p_i(1 − p_i)` for a projector. The empirical variance
/// is the same expression with each `σ_i²` replaced by its unbiased sample
/// estimate. Term `i` draws from `stream.child(i)`.
pub fn se_estimate(problem: &Problem, shots: &Shots, stream: &RngStream) -> Result<EstimateReport> {
    let l = problem.len();
    let mut report = EstimateReport::new(EstimatorKind::Se, stream.seed);
    report.circuits_used = l;
    let a = problem.coefficients();
    let sigma2 = problem.term_variances();
    let budgets: Vec<usize> = match shots {
        Shots::Exact => {
            report.mean = problem.exact_value();
            report.analytic_variance = a.iter().zip(&sigma2).map(|(a, s)| a * a * s).sum();
            return Ok(report);
        }
        Shots::Finite(n) => vec![*n; l],
        Shots::PerTerm(v) if v.len() != l => return Err(Error::DimensionMismatch { expected: l, found: v.len() }),
        Shots::PerTerm(v) => v.clone(),
    };
    if budgets.iter().any(|&n| n == 0) {
        return invalid("every term needs at least one shot");
    }
    let mut mean = problem.offset();
    let (mut analytic, mut empirical) = (0.0, 0.0);
    for i in 0..l {
        let n = budgets[i];
        let m = sample_moments(problem.term_probabilities(i), n, &stream.child(i as u64), |x| problem.value(x))?;
        mean += a[i] * m.mean();
        analytic += a[i] * a[i] * sigma2[i] / n as f64;
        empirical += a[i] * a[i] * m.variance() / n as f64;
    }
    report.mean = mean;
    report.analytic_variance = analytic;
    report.empirical_variance = empirical;
    report.shots_total = budgets.iter().map(|&n| n as u64).sum();
    Ok(report)
}
