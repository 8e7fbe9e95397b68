use core::fmt;
use core::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex;
use num_traits::{Float, Num};

/// Real scalar used throughout the crate.
///
/// Implemented for `f64` here; wider types (for example an MPFR wrapper with
/// a fixed number of mantissa bits) implement it downstream. Arithmetic goes
/// through owned values and `Clone`, so non-`Copy` big-float types fit.
pub trait Real:
    Num
    + Clone
    + PartialOrd
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Unit roundoff of the type (distance from 1 to the next value, halved or not;
    /// only the order of magnitude matters to callers).
    fn epsilon() -> Self;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn abs(&self) -> Self;
    fn is_finite(&self) -> bool;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn hypot(&self, other: &Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a >= b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return big;
        }
        let r = small / big.clone();
        big * (Self::one() + r.clone() * r).sqrt()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn sqrt(&self) -> Self {
        Float::sqrt(*self)
    }
    fn ln(&self) -> Self {
        Float::ln(*self)
    }
    fn exp(&self) -> Self {
        Float::exp(*self)
    }
    fn abs(&self) -> Self {
        Float::abs(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn hypot(&self, other: &Self) -> Self {
        Float::hypot(*self, *other)
    }
}

/// Modulus of a complex number without overflow in the intermediate square.
pub(crate) fn cabs<T: Real>(z: &Complex<T>) -> T {
    z.re.hypot(&z.im)
}

pub(crate) fn c<T: Real>(x: f64) -> T {
    T::from_f64(x)
}
