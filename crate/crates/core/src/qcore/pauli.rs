use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::matrix::ComplexMatrix;
use super::scalar::{c, Real, C};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix<T: Real>(self) -> ComplexMatrix<T> {
        let (o, z) = (C::<T>::one(), C::<T>::zero());
        let i = c(T::zero(), T::one());
        let data = match self {
            Pauli::I => vec![o, z, z, o],
            Pauli::X => vec![z, o, o, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![o, z, z, -o],
        };
        ComplexMatrix::from_vec(2, 2, data).expect("2x2")
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_letter(ch: char) -> Option<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis. Letter 0 acts on qubit 0, which is the
/// most significant bit of a computational-basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidInput("Pauli string needs at least one qubit".into()));
        }
        Ok(Self { letters })
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n] }
    }

    /// `Z ⊗ Z ⊗ … ⊗ Z`, the parity observable.
    pub fn z_prod(n: usize) -> Self {
        Self { letters: vec![Pauli::Z; n] }
    }

    /// Single non-identity letter `p` on `qubit` of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = p;
        Self { letters }
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        assert_eq!(self.n(), other.n(), "Pauli strings on different qubit counts");
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    pub fn matrix<T: Real>(&self) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::identity(1);
        for p in &self.letters {
            m = m.kron(&p.matrix());
        }
        m
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.n() - 1 - qubit)
    }

    /// Bit masks `(flip, phase)`: `P|j⟩ = i^{#Y}·(−1)^{|j ∧ phase|}·|j ⊕ flip⟩`.
    pub(crate) fn masks(&self) -> (usize, usize, usize) {
        let (mut flip, mut phase, mut ny) = (0usize, 0usize, 0usize);
        for (q, &p) in self.letters.iter().enumerate() {
            let b = self.bit(q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= b,
                Pauli::Y => {
                    flip |= b;
                    phase |= b;
                    ny += 1;
                }
                Pauli::Z => phase |= b,
            }
        }
        (flip, phase, ny)
    }

    /// Applies the string to a statevector without forming the matrix.
    pub fn apply<T: Real>(&self, psi: &[C<T>]) -> Vec<C<T>> {
        let (flip, phase, ny) = self.masks();
        let global = i_pow::<T>(ny);
        let mut out = vec![C::zero(); psi.len()];
        for (j, &a) in psi.iter().enumerate() {
            let sign = if (j & phase).count_ones() % 2 == 1 { -T::one() } else { T::one() };
            out[j ^ flip] = a * global * c(sign, T::zero());
        }
        out
    }
}

pub(crate) fn i_pow<T: Real>(k: usize) -> C<T> {
    match k % 4 {
        0 => c(T::one(), T::zero()),
        1 => c(T::zero(), T::one()),
        2 => c(-T::one(), T::zero()),
        _ => c(T::zero(), -T::one()),
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|ch| Pauli::from_letter(ch).ok_or_else(|| Error::InvalidInput(format!("bad Pauli letter '{ch}'"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}
