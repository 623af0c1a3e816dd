use std::fmt::Write as _;

use super::matrix::ComplexMatrix;
use super::pauli::PauliString;
use super::scalar::{c, Real};
use crate::error::{Error, Result};

/// Weighted sum of Pauli strings on a common qubit count.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable<T: Real> {
    n: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Real> Observable<T> {
    pub fn new(terms: Vec<(T, PauliString)>) -> Result<Self> {
        let n = terms.first().map(|t| t.1.n()).ok_or_else(|| Error::InvalidInput("observable needs at least one term".into()))?;
        if let Some(bad) = terms.iter().find(|t| t.1.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.1.n() });
        }
        if terms.len() > 4usize.saturating_pow(n as u32) {
            return Err(Error::InvalidInput(format!("{} terms exceed 4^{n}", terms.len())));
        }
        if terms.iter().any(|t| !t.0.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { n, terms })
    }

    pub fn single(coeff: T, p: PauliString) -> Self {
        Self { n: p.n(), terms: vec![(coeff, p)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    pub fn coefficients(&self) -> Vec<T> {
        self.terms.iter().map(|t| t.0).collect()
    }

    /// `Σ|a_i|`.
    pub fn one_norm(&self) -> T {
        self.terms.iter().map(|t| t.0.abs()).sum()
    }

    pub fn matrix(&self) -> ComplexMatrix<T> {
        let d = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(d, d);
        for (a, p) in &self.terms {
            m = &m + &p.matrix().scale(c(*a, T::zero()));
        }
        m
    }

    /// Parses the line format `<coeff> <letters>`; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (coeff, letters) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(Error::Parse { line: idx + 1, msg: "expected '<coeff> <letters>'".into() }),
            };
            let a: f64 = coeff.parse().map_err(|_| Error::Parse { line: idx + 1, msg: format!("bad coefficient '{coeff}'") })?;
            let p: PauliString = letters.parse().map_err(|e: Error| Error::Parse { line: idx + 1, msg: e.to_string() })?;
            terms.push((T::lit(a), p));
        }
        Self::new(terms)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (a, p) in &self.terms {
            let _ = writeln!(s, "{} {}", a.to_f64_lossy(), p);
        }
        s
    }
}
