//! Random gradient instances checked against the Fréchet oracle. Shared by the
//! core integration tests and the acceptance harness.

use qvar::estimators::Shots;
use qvar::gradients::{
    circuit_frechet_gradient, forward_gradient, frechet_gradient_oracle, grape_gradient, parameter_shift_gradient, sun_gradient, ControlProblem, CostSpec,
    Directions, GrapeMode, MultiParamGate, Pulse,
};
use qvar::qcore::gates::cnot;
use qvar::qcore::sampling::{haar_unitary, random_mixed_state, random_pure_state};
use qvar::qcore::{Pauli, PauliString, RngStream};
use qvar::randmat::{gue_sample, EnsembleSpec};
use qvar::{CMatrix, Circuit, Obs, State};
use rand::Rng;

/// Largest absolute deviation from the oracle seen by each method.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleDeviations {
    pub psr: f64,
    pub forward: f64,
    pub sun: f64,
    pub grape: f64,
    pub max_dim: usize,
}

fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    loop {
        let letters: Vec<Pauli> = (0..n).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)]).collect();
        let p = PauliString::new(letters).expect("nonempty");
        if !p.is_identity() {
            return p;
        }
    }
}

fn random_obs(n: usize, rng: &mut impl Rng) -> Obs {
    Obs::new((0..3).map(|_| (rng.gen_range(-1.0..1.0), random_pauli(n, rng))).collect()).expect("valid observable")
}

fn random_state(n: usize, rng: &mut impl Rng) -> State {
    if rng.gen::<bool>() {
        random_mixed_state(n, rng)
    } else {
        random_pure_state(n, rng)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Pauli rotations, one three-level generator `Z_a + ½Z_b` and CNOT
/// entanglers, with some parameters shared between gates.
fn random_circuit(n: usize, n_params: usize, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for k in 0..n_params {
        c.push_pauli_rotation(&random_pauli(n, rng), k).expect("valid gate");
        if n > 1 {
            let a = rng.gen_range(0..n);
            c.push_fixed(cnot(n, a, (a + 1) % n)).expect("valid gate");
        }
    }
    if n > 1 {
        let za = PauliString::single(n, 0, Pauli::Z).matrix::<f64>();
        let zb = PauliString::single(n, n - 1, Pauli::Z).matrix::<f64>();
        c.push_rotation(&za + &zb.scale_real(0.5), rng.gen_range(0..n_params)).expect("hermitian generator");
    }
    c.push_pauli_rotation(&random_pauli(n, rng), 0).expect("valid gate");
    c
}

fn unit_gue(d: usize, rng: &mut impl Rng) -> CMatrix {
    let h = gue_sample(&EnsembleSpec::gue(d, 1.0).expect("valid spec"), rng);
    let norm = h.spectral_norm();
    h.scale_real(1.0 / norm)
}

fn random_cost(d: usize, n: usize, rng: &mut impl Rng) -> CostSpec {
    match rng.gen_range(0..3) {
        0 => CostSpec::potq(haar_unitary(d, rng)),
        1 => CostSpec::infidelity(haar_unitary(d, rng)),
        _ => CostSpec::observable(&random_state(n, rng), &random_obs(n, rng)),
    }
}

/// Per-slice oracle for piecewise-constant controls: slice `s` is a gate with
/// generators `Δt·H_0, Δt·H_j` at angles `(1, u_j)`, and the rest of the
/// evolution is folded into the state and observable.
fn grape_oracle(problem: &ControlProblem, state: &State, obs: &Obs) -> Vec<f64> {
    let d = problem.dim();
    let dt = problem.dt();
    let slices = problem.slice_propagators();
    let n = slices.len();
    let k = problem.controls.len();
    let mut grad = vec![0.0; k * n];
    for s in 0..n {
        let prefix = slices[..s].iter().fold(CMatrix::identity(d), |acc, u| u.matmul(&acc));
        let suffix = slices[s + 1..].iter().fold(CMatrix::identity(d), |acc, u| u.matmul(&acc));
        let rho = state.density_matrix().conjugate_by(&prefix);
        let o = obs.matrix().conjugate_by(&suffix.adjoint());
        let mut gens = vec![problem.drift.scale_real(dt)];
        let mut theta = vec![1.0];
        for (j, h) in problem.controls.iter().enumerate() {
            gens.push(h.scale_real(dt));
            theta.push(problem.pulses[j].value(problem.midpoint(s), s));
        }
        let gate = MultiParamGate::new(gens, theta).expect("valid slice gate");
        let g = frechet_gradient_oracle(&CostSpec::Observable { rho, obs: o }, &gate).expect("oracle");
        for j in 0..k {
            grad[j * n + s] = g[j + 1];
        }
    }
    grad
}

/// Runs `count` instances over `d ∈ {2, 4, 8, 16}`.
pub fn oracle_deviations(count: usize, seed: u64) -> OracleDeviations {
    let mut out = OracleDeviations::default();
    for i in 0..count {
        let stream = RngStream::new(seed, i as u64);
        let mut rng = stream.rng();
        let n = 1 + i % 4;
        let d = 1usize << n;
        out.max_dim = out.max_dim.max(d);

        let state = random_state(n, &mut rng);
        let obs = random_obs(n, &mut rng);
        let n_params = rng.gen_range(2..=8);
        let circuit = random_circuit(n, n_params, &mut rng);
        let theta: Vec<f64> = (0..n_params).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let oracle = circuit_frechet_gradient(&CostSpec::observable(&state, &obs), &circuit, &theta).expect("oracle");
        let psr = parameter_shift_gradient(&circuit, &state, &obs, &theta, None, &Shots::Exact, &stream.child(1)).expect("psr");
        out.psr = out.psr.max(max_abs_diff(&psr, &oracle));
        let fwd = forward_gradient(&circuit, &state, &obs, &theta, Directions::Exhaustive, &Shots::Exact, &stream.child(2)).expect("forward");
        out.forward = out.forward.max(max_abs_diff(&fwd, &oracle));

        let k = rng.gen_range(2..=3);
        let gens: Vec<CMatrix> = (0..k).map(|_| unit_gue(d, &mut rng)).collect();
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let scale = rng.gen_range(0.05..1.0) / raw.iter().map(|x: &f64| x.abs()).sum::<f64>();
        let gate = MultiParamGate::new(gens, raw.iter().map(|x| x * scale).collect()).expect("valid gate");
        let cost = random_cost(d, n, &mut rng);
        let series = sun_gradient(&gate, &cost, 30).expect("series").gradient;
        out.sun = out.sun.max(max_abs_diff(&series, &frechet_gradient_oracle(&cost, &gate).expect("oracle")));

        let n_slices = rng.gen_range(1..=4);
        let drift = random_pauli(n, &mut rng).matrix::<f64>().scale_real(rng.gen_range(0.2..1.0));
        let controls: Vec<CMatrix> = (0..2).map(|_| random_pauli(n, &mut rng).matrix::<f64>()).collect();
        let pulses: Vec<Pulse> = (0..2).map(|_| Pulse::PiecewiseConstant((0..n_slices).map(|_| rng.gen_range(-1.0..1.0)).collect())).collect();
        let problem = ControlProblem::new(drift, controls, pulses, 0.0, rng.gen_range(0.5..1.5), n_slices).expect("valid control problem");
        let exact = grape_gradient(&problem, &state, &obs, GrapeMode::ExactOracle).expect("grape");
        out.grape = out.grape.max(max_abs_diff(&exact, &grape_oracle(&problem, &state, &obs)));
    }
    out
}
