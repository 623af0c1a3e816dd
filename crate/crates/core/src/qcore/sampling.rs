use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::gram_schmidt_columns;
use super::matrix::ComplexMatrix;
use super::rng::RngStream;
use super::scalar::{c, Real, C};
use super::state::QuantumState;
use crate::error::{Error, Result};

/// Computational-basis readout.
#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    /// Parity `(−1)^{popcount(x)}` of the outcome bitstring.
    ZProd,
    /// Diagonal projector given by its support; outcomes are 1 (inside) or 0.
    Projector(Vec<bool>),
}

impl Measurement {
    pub fn value(&self, x: usize) -> i8 {
        match self {
            Measurement::ZProd => super::gates::parity_sign(x),
            Measurement::Projector(support) => i8::from(support[x]),
        }
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            Measurement::Projector(support) if support.len() != d => Err(Error::DimensionMismatch { expected: d, found: support.len() }),
            _ => Ok(()),
        }
    }

    /// Exact mean of the readout under the given Born distribution.
    pub fn mean(&self, probs: &[f64]) -> f64 {
        probs.iter().enumerate().map(|(x, p)| p * f64::from(self.value(x))).sum()
    }
}

/// Draws `shots` indices from a discrete distribution by inverse CDF.
pub fn sample_indices(probs: &[f64], shots: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
    let total: f64 = probs.iter().sum();
    if !total.is_finite() || total <= 0.0 || probs.iter().any(|&p| p < -1e-12 || !p.is_finite()) {
        return Err(Error::InvalidState("probabilities must be finite and nonnegative".into()));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0) / total;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    Ok((0..shots)
        .map(|_| {
            let u: f64 = rng.gen();
            cdf.partition_point(|&v| v <= u).min(last)
        })
        .collect())
}

/// i.i.d. Born-rule readouts of `state`: ±1 for parity, 0/1 for a projector.
pub fn sample_measurement<T: Real>(state: &QuantumState<T>, m: &Measurement, shots: usize, stream: &RngStream) -> Result<Vec<i8>> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be ≥ 1".into()));
    }
    m.check_dim(state.dim())?;
    let probs: Vec<f64> = state.probabilities().iter().map(|p| p.to_f64_lossy()).collect();
    let mut rng = stream.rng();
    Ok(sample_indices(&probs, shots, &mut rng)?.into_iter().map(|x| m.value(x)).collect())
}

/// Sample mean and unbiased sample variance.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, ss / (n - 1) as f64)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput("slope needs at least two paired points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidInput("log-log slope needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Median; the mean of the two central values for even lengths.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Standard complex Gaussian entry `(a + ib)/√2`.
pub fn complex_normal<T: Real>(rng: &mut impl Rng) -> C<T> {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    c(T::lit(a * s), T::lit(b * s))
}

/// Haar-distributed unitary from the orthonormalized columns of a complex Ginibre matrix.
pub fn haar_unitary<T: Real>(d: usize, rng: &mut impl Rng) -> ComplexMatrix<T> {
    loop {
        let g = ComplexMatrix::from_fn(d, d, |_, _| complex_normal(rng));
        if let Ok(q) = gram_schmidt_columns(&g) {
            return q;
        }
    }
}

/// Haar-random pure state on `n` qubits.
pub fn random_pure_state<T: Real>(n: usize, rng: &mut impl Rng) -> QuantumState<T> {
    loop {
        let psi: Vec<C<T>> = (0..1usize << n).map(|_| complex_normal(rng)).collect();
        if let Ok(s) = QuantumState::from_unnormalized(psi) {
            return s;
        }
    }
}

/// Random full-rank mixed state `G G† / Tr(G G†)` with Ginibre `G`.
pub fn random_mixed_state<T: Real>(n: usize, rng: &mut impl Rng) -> QuantumState<T> {
    let d = 1usize << n;
    let g = ComplexMatrix::from_fn(d, d, |_, _| complex_normal::<T>(rng));
    let rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    let rho = rho.scale_real(T::one() / tr);
    // Symmetrize to remove rounding asymmetry before validation.
    let rho = (&rho + &rho.adjoint()).scale_real(T::lit(0.5));
    QuantumState::from_density(rho).expect("valid random density matrix")
}
