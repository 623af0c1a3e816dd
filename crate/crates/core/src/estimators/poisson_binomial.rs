use statrs::distribution::{Binomial, Discrete};

use crate::error::{invalid, Result};

/// Distribution of the number of successes among independent Bernoulli(p_i).
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonBinomial {
    pub pmf: Vec<f64>,
}

impl PoissonBinomial {
    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.pmf.iter().enumerate().map(|(k, p)| (k as f64 - m).powi(2) * p).sum()
    }
}

fn check(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return invalid("probabilities must lie in [0, 1]");
    }
    Ok(())
}

/// Exact PMF over `{0, …, L}` by iterated convolution with each Bernoulli.
pub fn poisson_binomial_pmf(p: &[f64]) -> Result<PoissonBinomial> {
    check(p)?;
    let mut pmf = vec![1.0];
    for &q in p {
        let mut next = vec![0.0; pmf.len() + 1];
        for (k, &v) in pmf.iter().enumerate() {
            next[k] += v * (1.0 - q);
            next[k + 1] += v * q;
        }
        pmf = next;
    }
    Ok(PoissonBinomial { pmf })
}

/// `Binomial(L, p̄)` with the same mean.
pub fn binomial_approx(p: &[f64]) -> Result<PoissonBinomial> {
    check(p)?;
    let l = p.len() as u64;
    if l == 0 {
        return Ok(PoissonBinomial { pmf: vec![1.0] });
    }
    let pbar = p.iter().sum::<f64>() / l as f64;
    let b = Binomial::new(pbar, l).map_err(|e| crate::Error::Numerical(e.to_string()))?;
    Ok(PoissonBinomial { pmf: (0..=l).map(|k| b.pmf(k)).collect() })
}

/// `Var_Binom − Var_PB = Σ(p_i − p̄)²`, zero exactly when all `p_i` are equal.
pub fn binomial_variance_gap(p: &[f64]) -> Result<f64> {
    check(p)?;
    if p.is_empty() {
        return Ok(0.0);
    }
    let pbar = p.iter().sum::<f64>() / p.len() as f64;
    Ok(p.iter().map(|q| (q - pbar).powi(2)).sum())
}
