use crate::error::{invalid, Error, Result};
use crate::qcore::gates::on_qubit;
use crate::qcore::{basis_rotation_for, Measurement, Pauli, Real};
use crate::{CMatrix, Obs, State};

use super::weights::LcuWeights;

const UNITARY_TOL: f64 = 1e-10;

/// One term `a_i · Tr(U_i ρ U_i† M)` of the estimated sum.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: f64,
    pub unitary: CMatrix,
}

/// Target `C = offset + Σ a_i Tr(U_i ρ U_i† M)` with a computational-basis
/// readout `M` (parity or a diagonal projector).
#[derive(Clone, Debug)]
pub struct Problem {
    state: State,
    terms: Vec<Term>,
    offset: f64,
    measurement: Measurement,
    probs: Vec<Vec<f64>>,
}

impl Problem {
    /// Zero-coefficient terms are dropped here.
    pub fn new(state: State, terms: Vec<Term>, offset: f64, measurement: Measurement) -> Result<Self> {
        let d = state.dim();
        measurement.check_dim(d)?;
        if !offset.is_finite() {
            return invalid("offset must be finite");
        }
        for t in &terms {
            if t.unitary.rows() != d || t.unitary.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: t.unitary.rows() });
            }
            if !t.coeff.is_finite() {
                return invalid("coefficients must be finite");
            }
            let err = t.unitary.unitarity_error();
            if err > UNITARY_TOL {
                return Err(Error::NotUnitary(err));
            }
        }
        let terms: Vec<Term> = terms.into_iter().filter(|t| t.coeff != 0.0).collect();
        let probs = terms.iter().map(|t| Ok(state.evolve(&t.unitary)?.probabilities())).collect::<Result<_>>()?;
        Ok(Self { state, terms, offset, measurement, probs })
    }

    /// `⟨𝒪⟩` on `state`: each non-identity Pauli term is read out as parity
    /// after its basis rotation, identity terms become the offset.
    pub fn from_observable(obs: &Obs, state: &State) -> Result<Self> {
        if obs.n() != state.n() {
            return Err(Error::DimensionMismatch { expected: state.n(), found: obs.n() });
        }
        let mut offset = 0.0;
        let mut terms = Vec::new();
        for (a, p) in obs.terms() {
            if p.is_identity() {
                offset += a;
                continue;
            }
            let rot = basis_rotation_for::<f64>(p)?;
            terms.push(Term { coeff: a * f64::from(rot.sign), unitary: rot.unitary });
        }
        Self::new(state.clone(), terms, offset, Measurement::ZProd)
    }

    pub fn from_unitaries(coeffs: &[f64], unitaries: &[CMatrix], state: &State, measurement: Measurement) -> Result<Self> {
        if coeffs.len() != unitaries.len() {
            return Err(Error::DimensionMismatch { expected: coeffs.len(), found: unitaries.len() });
        }
        let terms = coeffs.iter().zip(unitaries).map(|(&coeff, u)| Term { coeff, unitary: u.clone() }).collect();
        Self::new(state.clone(), terms, 0.0, measurement)
    }

    /// Equivalent problem with nonnegative coefficients: a negative parity
    /// term `a·U` becomes `|a|·X₀U`, since `X₀ Z_prod X₀ = −Z_prod`.
    pub fn absorb_signs(&self) -> Result<Self> {
        if self.measurement != Measurement::ZProd {
            return invalid("sign absorption needs a parity readout");
        }
        let x0 = on_qubit(self.state.n(), 0, &Pauli::X.matrix());
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.coeff < 0.0 {
                    Term { coeff: -t.coeff, unitary: x0.matmul(&t.unitary) }
                } else {
                    t.clone()
                }
            })
            .collect();
        Self::new(self.state.clone(), terms, self.offset, Measurement::ZProd)
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coeff).collect()
    }

    pub fn weights(&self) -> Result<LcuWeights> {
        LcuWeights::new(&self.coefficients())
    }

    /// Born distribution of `U_i ρ U_i†`.
    pub fn term_probabilities(&self, i: usize) -> &[f64] {
        &self.probs[i]
    }

    /// Readout value of basis outcome `x`.
    pub fn value(&self, x: usize) -> f64 {
        f64::from(self.measurement.value(x))
    }

    /// `m_i` (parity) or `p_i` (projector) for every term.
    pub fn term_means(&self) -> Vec<f64> {
        self.probs.iter().map(|p| self.measurement.mean(p)).collect()
    }

    /// Single-shot variance of every term's readout.
    pub fn term_variances(&self) -> Vec<f64> {
        self.probs
            .iter()
            .map(|p| {
                let mean = self.measurement.mean(p);
                let second: f64 = p.iter().enumerate().map(|(x, q)| q * self.value(x).powi(2)).sum();
                (second - mean * mean).max(0.0)
            })
            .collect()
    }

    /// Exact target value.
    pub fn exact_value(&self) -> f64 {
        self.offset + self.terms.iter().zip(self.term_means()).map(|(t, m)| t.coeff * m).sum::<f64>()
    }

    /// Readout mean of `ρ` itself, `Tr(ρ M)`.
    pub fn bare_mean(&self) -> f64 {
        let p: Vec<f64> = self.state.probabilities().iter().map(|x| x.to_f64_lossy()).collect();
        self.measurement.mean(&p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::sampling::random_pure_state;
    use crate::qcore::{observable_expectation, RngStream};

    #[test]
    fn observable_problem_reproduces_expectation() {
        let obs = Obs::parse_text("0.5 XZ\n-1.2 YY\n0.3 II\n0.7 IZ").unwrap();
        let state = random_pure_state::<f64>(2, &mut RngStream::new(1, 0).rng());
        let prob = Problem::from_observable(&obs, &state).unwrap();
        assert_eq!(prob.len(), 3);
        assert!((prob.offset() - 0.3).abs() < 1e-15);
        let exact = observable_expectation(&state, &obs).unwrap();
        assert!((prob.exact_value() - exact).abs() < 1e-12);
    }

    #[test]
    fn absorbing_signs_keeps_the_value() {
        let obs = Obs::parse_text("0.5 XZ\n-1.2 YY\n-0.4 ZI").unwrap();
        let state = random_pure_state::<f64>(2, &mut RngStream::new(2, 0).rng());
        let prob = Problem::from_observable(&obs, &state).unwrap();
        let abs = prob.absorb_signs().unwrap();
        assert!(abs.coefficients().iter().all(|&a| a > 0.0));
        assert!((abs.exact_value() - prob.exact_value()).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unitary_and_drops_zero_terms() {
        let state = State::zero(1);
        let bad = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert!(Problem::from_unitaries(&[1.0], &[bad], &state, Measurement::ZProd).is_err());
        let id = CMatrix::identity(2);
        let p = Problem::from_unitaries(&[0.0, 1.0], &[id.clone(), id], &state, Measurement::ZProd).unwrap();
        assert_eq!(p.len(), 1);
    }
}
