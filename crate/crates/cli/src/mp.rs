//! Fixed-precision MPFR scalar implementing [`twospectra::Real`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{Num, One, Zero};
use rug::Float;
use twospectra::Real;

use crate::decimal::Scalar;

/// Binary floating point with `BITS` mantissa bits.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp<const BITS: u32>(Float);

/// Working precision used by the CLI unless `--precision` says otherwise.
pub type Wide = Mp<256>;

impl<const BITS: u32> Mp<BITS> {
    pub fn new(value: Float) -> Self {
        if value.prec() == BITS {
            Self(value)
        } else {
            Self(Float::with_val(BITS, value))
        }
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }
}

impl<const BITS: u32> From<f64> for Mp<BITS> {
    fn from(x: f64) -> Self {
        Self(Float::with_val(BITS, x))
    }
}

impl<const BITS: u32> FromStr for Mp<BITS> {
    type Err = rug::float::ParseFloatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Float::parse(s.trim()).map(|p| Self(Float::with_val(BITS, p)))
    }
}

impl<const BITS: u32> fmt::Display for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*e}", p, self.0),
            None => f.write_str(&self.to_decimal()),
        }
    }
}

impl<const BITS: u32> fmt::Debug for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp<{BITS}>({})", self.to_decimal())
    }
}

macro_rules! binary_op {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl<const BITS: u32> $tr for Mp<BITS> {
            type Output = Self;
            fn $method(self, rhs: Self) -> Self {
                Self(self.0.$method(rhs.0))
            }
        }

        impl<const BITS: u32> $assign_tr for Mp<BITS> {
            fn $assign(&mut self, rhs: Self) {
                self.0.$assign(rhs.0);
            }
        }
    };
}

binary_op!(Add, add, AddAssign, add_assign);
binary_op!(Sub, sub, SubAssign, sub_assign);
binary_op!(Mul, mul, MulAssign, mul_assign);
binary_op!(Div, div, DivAssign, div_assign);

impl<const BITS: u32> Rem for Mp<BITS> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        Self(self.0 % rhs.0)
    }
}

impl<const BITS: u32> Neg for Mp<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl<const BITS: u32> Zero for Mp<BITS> {
    fn zero() -> Self {
        Self(Float::new(BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const BITS: u32> One for Mp<BITS> {
    fn one() -> Self {
        Self(Float::with_val(BITS, 1))
    }
}

impl<const BITS: u32> Num for Mp<BITS> {
    type FromStrRadixErr = rug::float::ParseFloatError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        Float::parse_radix(s, radix as i32).map(|p| Self(Float::with_val(BITS, p)))
    }
}

impl<const BITS: u32> Real for Mp<BITS> {
    fn from_f64(x: f64) -> Self {
        Self::from(x)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn epsilon() -> Self {
        Self(Float::with_val(BITS, Float::u_exp(1, 1 - BITS as i32)))
    }
    fn sqrt(&self) -> Self {
        Self(self.0.clone().sqrt())
    }
    fn ln(&self) -> Self {
        Self(self.0.clone().ln())
    }
    fn exp(&self) -> Self {
        Self(self.0.clone().exp())
    }
    fn abs(&self) -> Self {
        Self(self.0.clone().abs())
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn from_usize(n: usize) -> Self {
        Self(Float::with_val(BITS, n))
    }
    /// The exponent range makes the plain formula safe, and it is about
    /// twice as fast as MPFR's correctly rounded `hypot`.
    fn hypot(&self, other: &Self) -> Self {
        let mut sum = Float::with_val(BITS, self.0.square_ref());
        sum += Float::with_val(BITS, other.0.square_ref());
        Self(sum.sqrt())
    }
    fn max_of(self, other: Self) -> Self {
        match other.0.partial_cmp(&self.0) {
            Some(Ordering::Greater) => other,
            _ => self,
        }
    }
}
