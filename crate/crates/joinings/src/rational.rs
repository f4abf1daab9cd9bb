//! Exact arithmetic carriers: rational scalars and probability vectors.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};

use crate::system::SystemError;

/// Arbitrary-precision rational number. Stored in lowest terms with a
/// positive denominator; every measure and weight in this crate is one.
pub type Rational = BigRational;

/// Rational from machine integers: `rat(2, 4) == 1/2`.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `1 / 2^k`, exactly, for any `k`.
pub fn two_pow_neg(k: usize) -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(1) << k)
}

/// A probability vector: nonnegative rationals summing to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbVector(Vec<Rational>);

impl ProbVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self, SystemError> {
        if entries.is_empty() {
            return Err(SystemError::EmptyMeasure);
        }
        if let Some(i) = entries.iter().position(|p| p.is_negative()) {
            return Err(SystemError::NegativeMass { index: i });
        }
        let total: Rational = entries.iter().cloned().sum();
        if !total.is_one() {
            return Err(SystemError::MassNotNormalized { total });
        }
        Ok(ProbVector(entries))
    }

    /// The uniform vector `(1/n, …, 1/n)`.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform vector needs at least one entry");
        ProbVector(vec![rat(1, n as i64); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction: at least one entry
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    /// True when some entry is exactly zero.
    pub fn has_zero_entry(&self) -> bool {
        self.0.iter().any(|p| p.is_zero())
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

use num::One;
