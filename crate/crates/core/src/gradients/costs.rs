use crate::error::{Error, Result};
use crate::{CMatrix, Obs, State};

const UNITARY_TOL: f64 = 1e-9;

fn check_pair(v: &CMatrix, u: &CMatrix) -> Result<()> {
    if v.rows() != u.rows() || !v.is_square() || !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.rows(), found: v.rows() });
    }
    for m in [v, u] {
        let err = m.unitarity_error();
        if err > UNITARY_TOL {
            return Err(Error::NotUnitary(err));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotqCost {
    pub cost: f64,
    /// Probability of reading the control in 1.
    pub p_plus: f64,
    pub p_minus: f64,
}

/// `C = 1 − Re Tr(VU†)/d` with `p_± = ½(1 ± Re Tr(VU†)/d)`.
pub fn potq_cost(v: &CMatrix, u: &CMatrix) -> Result<PotqCost> {
    check_pair(v, u)?;
    let overlap = v.trace_product(&u.adjoint()).re / v.rows() as f64;
    Ok(PotqCost { cost: 1.0 - overlap, p_plus: 0.5 * (1.0 + overlap), p_minus: 0.5 * (1.0 - overlap) })
}

/// `I = 1 − |Tr(VU†)|²/d²`.
pub fn infidelity(v: &CMatrix, u: &CMatrix) -> Result<f64> {
    check_pair(v, u)?;
    let d = v.rows() as f64;
    Ok(1.0 - v.trace_product(&u.adjoint()).norm_sqr() / (d * d))
}

/// A scalar cost of a unitary `V`, with its first-order chain rule.
#[derive(Clone, Debug)]
pub enum CostSpec {
    Potq { target: CMatrix },
    Infidelity { target: CMatrix },
    /// `Tr(VρV†O)`.
    Observable { rho: CMatrix, obs: CMatrix },
}

impl CostSpec {
    pub fn potq(target: CMatrix) -> Self {
        CostSpec::Potq { target }
    }

    pub fn infidelity(target: CMatrix) -> Self {
        CostSpec::Infidelity { target }
    }

    pub fn observable(state: &State, obs: &Obs) -> Self {
        CostSpec::Observable { rho: state.density_matrix(), obs: obs.matrix() }
    }

    pub fn dim(&self) -> usize {
        match self {
            CostSpec::Potq { target } | CostSpec::Infidelity { target } => target.rows(),
            CostSpec::Observable { rho, .. } => rho.rows(),
        }
    }

    pub fn value(&self, v: &CMatrix) -> Result<f64> {
        match self {
            CostSpec::Potq { target } => Ok(potq_cost(v, target)?.cost),
            CostSpec::Infidelity { target } => infidelity(v, target),
            CostSpec::Observable { rho, obs } => {
                if v.rows() != rho.rows() {
                    return Err(Error::DimensionMismatch { expected: rho.rows(), found: v.rows() });
                }
                Ok(v.matmul(rho).matmul(&v.adjoint()).trace_product(obs).re)
            }
        }
    }

    /// Derivative of the cost along a direction in which `V` moves by `dv`:
    /// `−Re Tr(∂V U†)/d`, `−(2/d²) Re[conj(Tr VU†) Tr(∂V U†)]`, or `2 Re Tr(∂V ρ V† O)`.
    pub fn directional(&self, v: &CMatrix, dv: &CMatrix) -> f64 {
        let d = v.rows() as f64;
        match self {
            CostSpec::Potq { target } => -dv.trace_product(&target.adjoint()).re / d,
            CostSpec::Infidelity { target } => {
                let ud = target.adjoint();
                -2.0 / (d * d) * (v.trace_product(&ud).conj() * dv.trace_product(&ud)).re
            }
            CostSpec::Observable { rho, obs } => 2.0 * dv.matmul(rho).matmul(&v.adjoint()).trace_product(obs).re,
        }
    }
}
