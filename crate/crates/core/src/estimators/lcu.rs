//! LCU circuit simulation.
//!
//! Layout: control qubit ⊗ index register ⊗ system. The control starts in
//! `R₁|0⟩ = γ₀|0⟩ + γ₁|1⟩`, the register in `Σ √w_e |e⟩`, and register entry `e`
//! applies `V(c, e)` to the system on control value `c`. The register is never
//! measured, so tracing it out leaves the control–system blocks
//!
//! `ρ[c, c'] = γ_c γ̄_c' Σ_e w_e V(c, e) ρ V(c', e)†`,
//!
//! after which `R₂` acts on the control and both control and system are read
//! in the computational basis.

use num_traits::Zero;

use crate::error::{invalid, Error, Result};
use crate::qcore::gates::{hadamard, s_dagger};
use crate::qcore::{Pauli, RngStream};
use crate::{CMatrix, Complex, State};

use super::{sample_moments, EstimateReport, EstimatorKind, Problem, Shots};

/// One index-register basis state: its weight and the unitary (by index into
/// a list, `None` for identity) applied on each control value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegisterEntry {
    pub weight: f64,
    pub branch: [Option<usize>; 2],
}

/// Control-qubit dressing `(R₁, R₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dressing {
    /// `R₁ = X, R₂ = 𝕀`: the control is deterministically 1 and the system
    /// sees the mixture `Σ w_i U_i ρ U_i†`.
    XI,
    /// `R₁ = H, R₂ = X`.
    HX,
    /// `R₁ = H, R₂ = H`: control imbalance `Σ w_i Re Tr(U_i ρ)`.
    HH,
    /// `R₁ = H` and `R₂ = H·S†` (`S†` first): control imbalance `Σ w_i Im Tr(U_i ρ)`.
    HSH,
}

impl Dressing {
    pub fn r1(self) -> CMatrix {
        match self {
            Dressing::XI => Pauli::X.matrix(),
            _ => hadamard(),
        }
    }

    pub fn r2(self) -> CMatrix {
        match self {
            Dressing::XI => CMatrix::identity(2),
            Dressing::HX => Pauli::X.matrix(),
            Dressing::HH => hadamard(),
            Dressing::HSH => hadamard().matmul(&s_dagger()),
        }
    }
}

fn control_amplitudes(r1: &CMatrix) -> [Complex; 2] {
    [r1[(0, 0)], r1[(1, 0)]]
}

/// `V ρ W†` for a pure or mixed `ρ`, with `None` meaning identity.
fn sandwich(state: &State, v: Option<&CMatrix>, w: Option<&CMatrix>) -> CMatrix {
    let d = state.dim();
    match state.statevector() {
        Some(psi) => {
            let a = v.map_or_else(|| psi.to_vec(), |m| m.mul_vec(psi));
            let b = w.map_or_else(|| psi.to_vec(), |m| m.mul_vec(psi));
            CMatrix::from_fn(d, d, |i, j| a[i] * b[j].conj())
        }
        None => {
            let rho = state.density_matrix();
            let left = v.map_or(rho.clone(), |m| m.matmul(&rho));
            w.map_or(left.clone(), |m| left.matmul(&m.adjoint()))
        }
    }
}

/// Register-traced control–system blocks `ρ[c][c']`, before `R₂`.
pub(crate) fn reduced_blocks(gamma: [Complex; 2], entries: &[RegisterEntry], unitaries: &[CMatrix], state: &State) -> Result<[[CMatrix; 2]; 2]> {
    let d = state.dim();
    for e in entries {
        if !(e.weight >= 0.0) {
            return invalid("register weights must be nonnegative");
        }
        for u in e.branch.iter().flatten() {
            if *u >= unitaries.len() {
                return Err(Error::InvalidInput(format!("register entry refers to missing unitary {u}")));
            }
        }
    }
    let mut blocks = [[CMatrix::zeros(d, d), CMatrix::zeros(d, d)], [CMatrix::zeros(d, d), CMatrix::zeros(d, d)]];
    for c in 0..2 {
        for cp in 0..2 {
            let g = gamma[c] * gamma[cp].conj();
            if g.is_zero() {
                continue;
            }
            let mut acc = CMatrix::zeros(d, d);
            for e in entries.iter().filter(|e| e.weight > 0.0) {
                let s = sandwich(state, e.branch[c].map(|k| &unitaries[k]), e.branch[cp].map(|k| &unitaries[k]));
                acc = acc + s.scale_real(e.weight);
            }
            blocks[c][cp] = acc.scale(g);
        }
    }
    Ok(blocks)
}

/// Joint distribution `P(c, x)` at index `c·d + x` after `R₂`.
pub fn lcu_joint_probabilities(r1: &CMatrix, r2: &CMatrix, entries: &[RegisterEntry], unitaries: &[CMatrix], state: &State) -> Result<Vec<f64>> {
    for r in [r1, r2] {
        if r.rows() != 2 || r.cols() != 2 || !r.is_unitary(1e-10) {
            return invalid("control dressing must be a 2×2 unitary");
        }
    }
    let blocks = reduced_blocks(control_amplitudes(r1), entries, unitaries, state)?;
    let d = state.dim();
    let mut probs = vec![0.0; 2 * d];
    for out in 0..2 {
        for x in 0..d {
            let mut p = Complex::zero();
            for c in 0..2 {
                for cp in 0..2 {
                    p += r2[(out, c)] * r2[(out, cp)].conj() * blocks[c][cp][(x, x)];
                }
            }
            probs[out * d + x] = p.re.max(0.0);
        }
    }
    Ok(probs)
}

/// Joint readout of a nonnegative-weight problem under a given dressing.
#[derive(Clone, Debug, PartialEq)]
pub struct DressedReadout {
    /// `P(c, x)` at `c·d + x`.
    pub joint: Vec<f64>,
    /// Control marginals `P(c)`.
    pub control: [f64; 2],
    /// `Σ_x P(c, x)·value(x)` for each control outcome.
    pub readout: [f64; 2],
}

fn positive_entries(problem: &Problem) -> Result<Vec<RegisterEntry>> {
    if problem.is_empty() {
        return invalid("LCU needs at least one term");
    }
    if problem.coefficients().iter().any(|&a| a < 0.0) {
        return invalid("negative coefficient: use a signed LCU variant or absorb the signs");
    }
    let w = problem.weights()?;
    Ok(w.w.iter().enumerate().map(|(i, &weight)| RegisterEntry { weight, branch: [None, Some(i)] }).collect())
}

fn unitaries(problem: &Problem) -> Vec<CMatrix> {
    problem.terms().iter().map(|t| t.unitary.clone()).collect()
}

pub fn dressed_readout(problem: &Problem, dressing: Dressing) -> Result<DressedReadout> {
    let entries = positive_entries(problem)?;
    let joint = lcu_joint_probabilities(&dressing.r1(), &dressing.r2(), &entries, &unitaries(problem), problem.state())?;
    let d = problem.dim();
    let mut control = [0.0; 2];
    let mut readout = [0.0; 2];
    for c in 0..2 {
        for x in 0..d {
            control[c] += joint[c * d + x];
            readout[c] += joint[c * d + x] * problem.value(x);
        }
    }
    Ok(DressedReadout { joint, control, readout })
}

/// LCU estimator `C̃ = offset + ‖a‖₁ x̄` with the `{X, 𝕀}` dressing.
///
/// Each shot reads `value(x)` when the control is 1 and 0 otherwise, so the
/// single-shot mean is `Σ w_i m_i` and the analytic variance is
/// `‖a‖₁²(1 − m̄²)/n` for parity or `‖a‖₁² p̄(1 − p̄)/n` for a projector.
pub fn lcu_estimate(problem: &Problem, shots: &Shots, stream: &RngStream) -> Result<EstimateReport> {
    let budget = shots.single()?;
    let entries = positive_entries(problem)?;
    let norm = problem.weights()?.one_norm;
    let dressing = Dressing::XI;
    let joint = lcu_joint_probabilities(&dressing.r1(), &dressing.r2(), &entries, &unitaries(problem), problem.state())?;
    let d = problem.dim();
    let value = |k: usize| if k >= d { problem.value(k - d) } else { 0.0 };
    let mean1: f64 = joint.iter().enumerate().map(|(k, p)| p * value(k)).sum();
    let second: f64 = joint.iter().enumerate().map(|(k, p)| p * value(k).powi(2)).sum();
    let sigma2 = (second - mean1 * mean1).max(0.0);

    let mut report = EstimateReport::new(EstimatorKind::Lcu, stream.seed);
    report.circuits_used = 1;
    match budget {
        None => {
            report.mean = problem.offset() + norm * mean1;
            report.analytic_variance = norm * norm * sigma2;
        }
        Some(n) => {
            let m = sample_moments(&joint, n, stream, value)?;
            report.mean = problem.offset() + norm * m.mean();
            report.analytic_variance = norm * norm * sigma2 / n as f64;
            report.empirical_variance = norm * norm * m.variance() / n as f64;
            report.shots_total = n as u64;
        }
    }
    Ok(report)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::estimators::weights::register_qubits;
    use crate::qcore::sampling::{haar_unitary, random_mixed_state, random_pure_state};
    use crate::qcore::{observable_expectation, Measurement};
    use crate::Obs;

    /// Full control ⊗ register ⊗ system simulation: prepares the register by
    /// amplitude assignment over `2^r` slots (zero-padded), applies the
    /// block-diagonal controlled unitary, `R₂`, then traces the register.
    pub(crate) fn joint_oracle(r1: &CMatrix, r2: &CMatrix, entries: &[RegisterEntry], unitaries: &[CMatrix], state: &State) -> Vec<f64> {
        let d = state.dim();
        let slots = 1usize << register_qubits(entries.len());
        let reg: Vec<Complex> = (0..slots).map(|e| Complex::from(entries.get(e).map_or(0.0, |x| x.weight).sqrt())).collect();
        let ctrl = r1.mul_vec(&[Complex::from(1.0), Complex::zero()]);
        let dim = 2 * slots * d;
        let mut big = CMatrix::zeros(dim, dim);
        for c in 0..2 {
            for e in 0..slots {
                let v = entries.get(e).and_then(|x| x.branch[c]).map_or(CMatrix::identity(d), |k| unitaries[k].clone());
                big.set_block((c * slots + e) * d, (c * slots + e) * d, &v);
            }
        }
        let r2_full = r2.kron(&CMatrix::identity(slots * d));
        let u = r2_full.matmul(&big);
        let prep = CMatrix::from_fn(2, 1, |i, _| ctrl[i]).kron(&CMatrix::from_fn(slots, 1, |i, _| reg[i]));
        let rho_in = prep.matmul(&prep.adjoint()).kron(&state.density_matrix());
        let rho_out = rho_in.conjugate_by(&u);
        let mut probs = vec![0.0; 2 * d];
        for c in 0..2 {
            for e in 0..slots {
                for x in 0..d {
                    let k = (c * slots + e) * d + x;
                    probs[c * d + x] += rho_out[(k, k)].re;
                }
            }
        }
        probs
    }

    fn random_problem(l: usize, n: usize, seed: u64, mixed: bool) -> Problem {
        let mut rng = RngStream::new(seed, 0).rng();
        let state = if mixed { random_mixed_state::<f64>(n, &mut rng) } else { random_pure_state::<f64>(n, &mut rng) };
        let us: Vec<CMatrix> = (0..l).map(|_| haar_unitary(1 << n, &mut rng)).collect();
        let a: Vec<f64> = (0..l).map(|i| 0.3 + 0.2 * i as f64).collect();
        Problem::from_unitaries(&a, &us, &state, Measurement::ZProd).unwrap()
    }

    #[test]
    fn blocks_match_full_joint_simulation() {
        for (l, mixed) in [(1, false), (3, true), (5, false)] {
            let prob = random_problem(l, 2, 10 + l as u64, mixed);
            let entries = positive_entries(&prob).unwrap();
            let us = unitaries(&prob);
            for dress in [Dressing::XI, Dressing::HX, Dressing::HH, Dressing::HSH] {
                let fast = lcu_joint_probabilities(&dress.r1(), &dress.r2(), &entries, &us, prob.state()).unwrap();
                let slow = joint_oracle(&dress.r1(), &dress.r2(), &entries, &us, prob.state());
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-12, "{dress:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn dressings_read_out_their_targets() {
        let prob = random_problem(3, 2, 21, true);
        let w = prob.weights().unwrap().w;
        let m = prob.term_means();
        let mbar: f64 = w.iter().zip(&m).map(|(a, b)| a * b).sum();
        let rho = prob.state().density_matrix();
        let overlap: Complex = prob.terms().iter().zip(&w).map(|(t, wi)| t.unitary.trace_product(&rho) * *wi).sum();

        let xi = dressed_readout(&prob, Dressing::XI).unwrap();
        assert!((xi.control[1] - 1.0).abs() < 1e-12);
        assert!((xi.readout[1] - mbar).abs() < 1e-12);

        // The U-branch lands on control 0 with weight ½: the ½ prefactor of p_i.
        let hx = dressed_readout(&prob, Dressing::HX).unwrap();
        assert!((hx.readout[0] - 0.5 * mbar).abs() < 1e-12);
        assert!((hx.readout[1] - 0.5 * prob.bare_mean()).abs() < 1e-12);

        let hh = dressed_readout(&prob, Dressing::HH).unwrap();
        assert!((hh.control[0] - hh.control[1] - overlap.re).abs() < 1e-12);
        let hsh = dressed_readout(&prob, Dressing::HSH).unwrap();
        assert!((hsh.control[0] - hsh.control[1] - overlap.im).abs() < 1e-12);
    }

    #[test]
    fn uniform_weight_moments() {
        // w = (½, ½), m = (0.2, 0.8): m̄ = 0.5 and σ² = 0.75.
        let state = State::zero(1);
        let ry = |m: f64| crate::qcore::linalg::exp_i_hermitian(&Pauli::Y.matrix(), 0.5 * m.acos());
        let prob = Problem::from_unitaries(&[1.0, 1.0], &[ry(0.2), ry(0.8)], &state, Measurement::ZProd).unwrap();
        let m = prob.term_means();
        assert!((m[0] - 0.2).abs() < 1e-12 && (m[1] - 0.8).abs() < 1e-12);
        let r = lcu_estimate(&prob, &Shots::Exact, &RngStream::new(0, 0)).unwrap();
        assert!((r.mean / 2.0 - 0.5).abs() < 1e-12);
        assert!((r.analytic_variance / 4.0 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn single_term_reduces_to_one_circuit() {
        let prob = random_problem(1, 2, 30, false);
        let r = lcu_estimate(&prob, &Shots::Exact, &RngStream::new(0, 0)).unwrap();
        let a = prob.coefficients()[0];
        let m = prob.term_means()[0];
        assert!((r.mean - a * m).abs() < 1e-12);
        assert!((r.analytic_variance - a * a * (1.0 - m * m)).abs() < 1e-12);
    }

    #[test]
    fn exact_mode_matches_dense_oracle() {
        let obs = Obs::parse_text("0.3 XZ\n0.5 YY\n0.2 ZX").unwrap();
        let state = random_pure_state::<f64>(2, &mut RngStream::new(31, 0).rng());
        let prob = Problem::from_observable(&obs, &state).unwrap();
        let r = lcu_estimate(&prob, &Shots::Exact, &RngStream::new(0, 0)).unwrap();
        let exact = observable_expectation(&state, &obs).unwrap();
        assert!((r.mean / obs.one_norm() - exact / obs.one_norm()).abs() < 1e-10);
    }

    #[test]
    fn projector_case_variance() {
        let prob0 = random_problem(4, 2, 32, false);
        let support = vec![true, false, false, true];
        let us = unitaries(&prob0);
        let prob = Problem::from_unitaries(&prob0.coefficients(), &us, prob0.state(), Measurement::Projector(support)).unwrap();
        let w = prob.weights().unwrap();
        let pbar: f64 = w.w.iter().zip(prob.term_means()).map(|(a, b)| a * b).sum();
        let r = lcu_estimate(&prob, &Shots::Finite(400), &RngStream::new(1, 2)).unwrap();
        let expect = w.one_norm.powi(2) * pbar * (1.0 - pbar) / 400.0;
        assert!((r.analytic_variance - expect).abs() < 1e-12);
        assert!(r.analytic_variance <= w.one_norm.powi(2) / (4.0 * 400.0) + 1e-15);
    }

    #[test]
    fn repetition_study_is_unbiased_with_matching_variance() {
        let prob = random_problem(3, 2, 33, true);
        let exact = prob.exact_value();
        let reps = 10_000;
        let means: Vec<f64> = (0..reps)
            .map(|r| lcu_estimate(&prob, &Shots::Finite(100), &RngStream::for_batch(33, 0, r)).unwrap().mean)
            .collect();
        let (m, v) = crate::qcore::sampling::mean_and_variance(&means);
        let analytic = lcu_estimate(&prob, &Shots::Finite(100), &RngStream::new(0, 0)).unwrap().analytic_variance;
        assert!((v / analytic - 1.0).abs() < 0.1);
        assert!((m - exact).abs() < 5.0 * (analytic / reps as f64).sqrt());
    }

    #[test]
    fn negative_coefficients_are_rejected() {
        let obs = Obs::parse_text("0.3 XZ\n-0.5 YY").unwrap();
        let prob = Problem::from_observable(&obs, &State::zero(2)).unwrap();
        assert!(lcu_estimate(&prob, &Shots::Exact, &RngStream::new(0, 0)).is_err());
        let abs = prob.absorb_signs().unwrap();
        let r = lcu_estimate(&abs, &Shots::Exact, &RngStream::new(0, 0)).unwrap();
        assert!((r.mean - prob.exact_value()).abs() < 1e-12);
    }
}
