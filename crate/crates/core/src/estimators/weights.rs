use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Register weights `w_i = |a_i|/‖a‖₁` with the sign split of the raw coefficients.
///
/// Zero coefficients are dropped on construction, so `raw` may be shorter than
/// the input and every kept coefficient has a definite sign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcuWeights {
    pub raw: Vec<f64>,
    pub w: Vec<f64>,
    pub one_norm: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    /// Indices into the original coefficient list of the kept entries.
    pub kept: Vec<usize>,
}

impl LcuWeights {
    pub fn new(a: &[f64]) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite()) {
            return invalid("coefficients must be finite");
        }
        let kept: Vec<usize> = (0..a.len()).filter(|&i| a[i] != 0.0).collect();
        if kept.is_empty() {
            return invalid("all coefficients are zero");
        }
        let raw: Vec<f64> = kept.iter().map(|&i| a[i]).collect();
        let one_norm: f64 = raw.iter().map(|x| x.abs()).sum();
        let w = raw.iter().map(|x| x.abs() / one_norm).collect();
        let n_pos = raw.iter().filter(|&&x| x > 0.0).count();
        Ok(Self { n_neg: raw.len() - n_pos, raw, w, one_norm, n_pos, kept })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Register qubits `⌈log₂ L⌉`.
    pub fn register_qubits(&self) -> usize {
        register_qubits(self.len())
    }

    pub fn sign(&self, i: usize) -> f64 {
        self.raw[i].signum()
    }

    /// `(‖a⁺‖₁, ‖a⁻‖₁)`.
    pub fn split_norms(&self) -> (f64, f64) {
        let pos = self.raw.iter().filter(|&&x| x > 0.0).sum();
        let neg = -self.raw.iter().filter(|&&x| x < 0.0).sum::<f64>();
        (pos, neg)
    }

    /// Total weight on positive and on negative entries, `(W⁺, W⁻)`.
    pub fn split_mass(&self) -> (f64, f64) {
        let (p, n) = self.split_norms();
        (p / self.one_norm, n / self.one_norm)
    }
}

pub(crate) fn register_qubits(l: usize) -> usize {
    if l <= 1 {
        0
    } else {
        (usize::BITS - (l - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn drops_zeros_and_splits() {
        let w = LcuWeights::new(&[0.5, 0.0, -1.5, 2.0]).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.kept, vec![0, 2, 3]);
        assert_eq!((w.n_pos, w.n_neg), (2, 1));
        assert!((w.one_norm - 4.0).abs() < 1e-15);
        assert_eq!(w.split_norms(), (2.5, 1.5));
        assert!(LcuWeights::new(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn register_sizes() {
        let sizes: Vec<usize> = [1, 2, 3, 4, 5, 8, 9, 16, 17].iter().map(|&l| register_qubits(l)).collect();
        assert_eq!(sizes, vec![0, 1, 2, 2, 3, 3, 4, 4, 5]);
    }

    proptest! {
        #[test]
        fn weights_are_a_distribution(a in proptest::collection::vec(-5.0f64..5.0, 1..20)) {
            prop_assume!(a.iter().any(|&x| x != 0.0));
            let w = LcuWeights::new(&a).unwrap();
            let total: f64 = w.w.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(w.w.iter().all(|&x| (0.0..=1.0).contains(&x)));
            prop_assert_eq!(w.n_pos + w.n_neg, w.len());
            let l1: f64 = a.iter().map(|x| x.abs()).sum();
            prop_assert!((w.one_norm - l1).abs() < 1e-12);
        }
    }
}
