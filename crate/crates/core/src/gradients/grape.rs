use crate::error::{invalid, Error, Result};
use crate::qcore::linalg::{exp_i_hermitian, expm_frechet};
use crate::qcore::C;
use crate::{CMatrix, Obs, State};

use super::CostSpec;

/// Control amplitude `u(t; φ)` with its analytic parameter gradient.
#[derive(Clone, Debug, PartialEq)]
pub enum Pulse {
    /// One amplitude per time slice.
    PiecewiseConstant(Vec<f64>),
    /// `A exp(−(t−μ)²/(2σ²))`.
    Gaussian { amplitude: f64, center: f64, width: f64 },
}

impl Pulse {
    pub fn n_params(&self) -> usize {
        match self {
            Pulse::PiecewiseConstant(a) => a.len(),
            Pulse::Gaussian { .. } => 3,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            Pulse::PiecewiseConstant(a) => a.clone(),
            Pulse::Gaussian { amplitude, center, width } => vec![*amplitude, *center, *width],
        }
    }

    pub fn with_params(&self, p: &[f64]) -> Result<Self> {
        if p.len() != self.n_params() {
            return Err(Error::DimensionMismatch { expected: self.n_params(), found: p.len() });
        }
        Ok(match self {
            Pulse::PiecewiseConstant(_) => Pulse::PiecewiseConstant(p.to_vec()),
            Pulse::Gaussian { .. } => Pulse::Gaussian { amplitude: p[0], center: p[1], width: p[2] },
        })
    }

    /// Amplitude at time `t`, which falls in slice `slice`.
    pub fn value(&self, t: f64, slice: usize) -> f64 {
        match self {
            Pulse::PiecewiseConstant(a) => a[slice],
            Pulse::Gaussian { amplitude, center, width } => amplitude * (-(t - center).powi(2) / (2.0 * width * width)).exp(),
        }
    }

    /// `∂u/∂φ` at time `t` in slice `slice`.
    pub fn param_grad(&self, t: f64, slice: usize) -> Vec<f64> {
        match self {
            Pulse::PiecewiseConstant(a) => {
                let mut g = vec![0.0; a.len()];
                g[slice] = 1.0;
                g
            }
            Pulse::Gaussian { amplitude, center, width } => {
                let x = t - center;
                let e = (-x * x / (2.0 * width * width)).exp();
                vec![e, amplitude * e * x / (width * width), amplitude * e * x * x / width.powi(3)]
            }
        }
    }
}

/// `H(t) = H₀ + Σ_j u_j(t) H_j` on `[t₀, T]`, split into `N_T` uniform slices
/// with the pulses sampled at slice midpoints.
#[derive(Clone, Debug)]
pub struct ControlProblem {
    pub drift: CMatrix,
    pub controls: Vec<CMatrix>,
    pub pulses: Vec<Pulse>,
    pub t0: f64,
    pub t_final: f64,
    pub n_slices: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrapeMode {
    /// Fréchet derivative of every slice propagator, chained through the product.
    ExactOracle,
    /// `Σ_n i Tr(ρ_T [H̃_j(t_n), O]) ∂u_j(t_n)/∂φ Δt` with `H̃_j` the control
    /// operator carried from the slice midpoint to `T`.
    LcuGrapeSum,
}

impl ControlProblem {
    pub fn new(drift: CMatrix, controls: Vec<CMatrix>, pulses: Vec<Pulse>, t0: f64, t_final: f64, n_slices: usize) -> Result<Self> {
        let d = drift.rows();
        for h in std::iter::once(&drift).chain(&controls) {
            if h.rows() != d || !h.is_square() {
                return Err(Error::DimensionMismatch { expected: d, found: h.rows() });
            }
            let err = h.hermiticity_error();
            if err > 1e-10 {
                return Err(Error::NotHermitian(err));
            }
        }
        if controls.len() != pulses.len() {
            return Err(Error::DimensionMismatch { expected: controls.len(), found: pulses.len() });
        }
        if n_slices == 0 {
            return invalid("time grid needs at least one slice");
        }
        if !(t_final > t0) || !t0.is_finite() || !t_final.is_finite() {
            return invalid("horizon must satisfy t₀ < T");
        }
        for p in &pulses {
            match p {
                Pulse::PiecewiseConstant(a) if a.len() != n_slices => {
                    return Err(Error::DimensionMismatch { expected: n_slices, found: a.len() });
                }
                Pulse::Gaussian { width, .. } if *width <= 0.0 => return invalid("Gaussian width must be positive"),
                _ => {}
            }
        }
        Ok(Self { drift, controls, pulses, t0, t_final, n_slices })
    }

    pub fn dim(&self) -> usize {
        self.drift.rows()
    }

    pub fn dt(&self) -> f64 {
        (self.t_final - self.t0) / self.n_slices as f64
    }

    pub fn midpoint(&self, n: usize) -> f64 {
        self.t0 + (n as f64 + 0.5) * self.dt()
    }

    pub fn n_params(&self) -> usize {
        self.pulses.iter().map(Pulse::n_params).sum()
    }

    pub fn params(&self) -> Vec<f64> {
        self.pulses.iter().flat_map(Pulse::params).collect()
    }

    pub fn with_params(&self, phi: &[f64]) -> Result<Self> {
        if phi.len() != self.n_params() {
            return Err(Error::DimensionMismatch { expected: self.n_params(), found: phi.len() });
        }
        let mut offset = 0;
        let mut pulses = Vec::with_capacity(self.pulses.len());
        for p in &self.pulses {
            pulses.push(p.with_params(&phi[offset..offset + p.n_params()])?);
            offset += p.n_params();
        }
        Self::new(self.drift.clone(), self.controls.clone(), pulses, self.t0, self.t_final, self.n_slices)
    }

    pub fn slice_hamiltonian(&self, n: usize) -> CMatrix {
        let t = self.midpoint(n);
        self.controls.iter().zip(&self.pulses).fold(self.drift.clone(), |acc, (h, p)| &acc + &h.scale_real(p.value(t, n)))
    }

    pub fn slice_propagators(&self) -> Vec<CMatrix> {
        (0..self.n_slices).map(|n| exp_i_hermitian(&self.slice_hamiltonian(n), self.dt())).collect()
    }

    /// `U(T, t₀) = U_{N−1} ⋯ U_0`.
    pub fn propagator(&self) -> CMatrix {
        self.slice_propagators().iter().fold(CMatrix::identity(self.dim()), |acc, u| u.matmul(&acc))
    }

    /// `Tr(ρ(T) O)`.
    pub fn cost(&self, state: &State, obs: &Obs) -> Result<f64> {
        CostSpec::observable(state, obs).value(&self.propagator())
    }
}

/// Gradient of `Tr(ρ(T) O)` over the flattened pulse parameters.
pub fn grape_gradient(problem: &ControlProblem, state: &State, obs: &Obs, mode: GrapeMode) -> Result<Vec<f64>> {
    let d = problem.dim();
    if state.dim() != d || obs.matrix().rows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: state.dim() });
    }
    let dt = problem.dt();
    let slices = problem.slice_propagators();
    let n = slices.len();
    let mut prefix = vec![CMatrix::identity(d)];
    for u in &slices {
        let next = u.matmul(prefix.last().expect("nonempty"));
        prefix.push(next);
    }
    let mut suffix = vec![CMatrix::identity(d); n];
    for k in (0..n.saturating_sub(1)).rev() {
        suffix[k] = suffix[k + 1].matmul(&slices[k + 1]);
    }
    let total = prefix[n].clone();
    let cost = CostSpec::observable(state, obs);
    let o = obs.matrix();
    let rho_t = state.density_matrix().conjugate_by(&total);
    let mi = C::new(0.0, -1.0);

    // ∂C/∂u_{j,n} for every control and slice.
    let du: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            let h = problem.slice_hamiltonian(s);
            let half = match mode {
                GrapeMode::LcuGrapeSum => Some(suffix[s].matmul(&exp_i_hermitian(&h, 0.5 * dt))),
                GrapeMode::ExactOracle => None,
            };
            problem
                .controls
                .iter()
                .map(|hj| match &half {
                    None => {
                        let (_, dslice) = expm_frechet(&h.scale(mi * dt), &hj.scale(mi * dt));
                        cost.directional(&total, &suffix[s].matmul(&dslice).matmul(&prefix[s]))
                    }
                    Some(w) => {
                        let carried = hj.conjugate_by(w);
                        (C::new(0.0, 1.0) * carried.commutator(&o).trace_product(&rho_t)).re * dt
                    }
                })
                .collect()
        })
        .collect();

    let mut grad = Vec::with_capacity(problem.n_params());
    for (j, pulse) in problem.pulses.iter().enumerate() {
        let mut g = vec![0.0; pulse.n_params()];
        for (s, row) in du.iter().enumerate() {
            for (gi, pg) in g.iter_mut().zip(pulse.param_grad(problem.midpoint(s), s)) {
                *gi += pg * row[j];
            }
        }
        grad.extend(g);
    }
    Ok(grad)
}
