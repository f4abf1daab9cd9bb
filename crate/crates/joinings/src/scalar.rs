//! Number abstraction over exact rationals and `f64`.
//!
//! Exact mode is the default everywhere; the floating mode exists for long
//! Markov horizons where the rational numerators grow without bound.
//! Comparisons in floating mode use the fixed tolerance [`F64_TOLERANCE`].

use num::ToPrimitive;
use num::{One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::rational::Rational;

/// Absolute tolerance for `f64` validity checks (row sums, stationarity).
pub const F64_TOLERANCE: f64 = 1e-12;

/// Scalar field for Markov-shift computations.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Display
    + Debug
{
    fn from_rational(r: &Rational) -> Self;

    /// Treat as zero: exact zero for rationals, `|x| ≤ 1e−12` for `f64`.
    fn is_negligible(&self) -> bool;

    fn abs_val(&self) -> Self;

    fn to_f64(&self) -> f64;

    fn from_integer(n: i64) -> Self {
        Self::from_rational(&crate::rational::rat(n, 1))
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn abs_val(&self) -> Self {
        num::Signed::abs(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= F64_TOLERANCE
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rational_scalar_is_exact() {
        let x = Rational::from_rational(&rat(1, 3));
        assert!((x.clone() - rat(1, 3)).is_negligible());
        assert!((x * rat(3, 1) - rat(1, 1)).is_negligible());
    }

    #[test]
    fn f64_scalar_uses_tolerance() {
        let x = f64::from_rational(&rat(1, 3));
        assert!((x * 3.0 - 1.0).is_negligible());
        assert!(!0.5f64.is_negligible());
    }
}
