//! Shortest round-trip decimal text for the supported scalar types.

use std::str::FromStr;

use rug::Float;
use twospectra::Real;

use crate::mp::Mp;

/// Scalars the CLI can read and write.
pub trait Scalar: Real + Send + Sync + 'static {
    /// Mantissa bits, used in reports.
    const BITS: u32;

    fn parse_decimal(text: &str) -> Option<Self>;

    /// The shortest decimal that parses back to exactly `self`, in a
    /// canonical layout so that rewriting a file is byte-stable.
    fn to_decimal(&self) -> String;
}

impl Scalar for f64 {
    const BITS: u32 = 53;

    fn parse_decimal(text: &str) -> Option<Self> {
        f64::from_str(text.trim()).ok().filter(|x| x.is_finite())
    }

    fn to_decimal(&self) -> String {
        if *self == 0.0 {
            return "0".into();
        }
        let sci = format!("{:e}", self.abs());
        let (mantissa, exp) = sci.split_once('e').expect("`{:e}` always has an exponent");
        let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
        let exp: i32 = exp.parse().expect("integer exponent");
        layout(*self < 0.0, &digits, exp + 1)
    }
}

impl<const BITS: u32> Scalar for Mp<BITS> {
    const BITS: u32 = BITS;

    fn parse_decimal(text: &str) -> Option<Self> {
        let parsed = Float::parse(text.trim()).ok()?;
        let value = Float::with_val(BITS, parsed);
        value.is_finite().then(|| Mp::new(value))
    }

    fn to_decimal(&self) -> String {
        let x = self.inner();
        if x.is_zero() {
            return "0".into();
        }
        let render = |n: usize| {
            let (neg, digits, exp) = x.to_sign_string_exp(10, Some(n));
            layout(neg, &digits, exp.unwrap_or(0))
        };
        let round_trips = |s: &str| Self::parse_decimal(s).is_some_and(|y| &y == self);
        let max = (BITS as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        let (mut lo, mut hi) = (1, max);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if round_trips(&render(mid)) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let text = render(lo);
        if round_trips(&text) {
            text
        } else {
            render(max)
        }
    }
}

/// Formats `±0.DIGITS × 10^point`: plain notation for moderate exponents,
/// scientific otherwise.
fn layout(negative: bool, digits: &str, point: i32) -> String {
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let len = digits.len() as i32;
    let body = if (-5..=0).contains(&point) {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point > 0 && point <= 21 {
        if point >= len {
            format!("{}{}", digits, "0".repeat((point - len) as usize))
        } else {
            let (int, frac) = digits.split_at(point as usize);
            format!("{int}.{frac}")
        }
    } else {
        let (lead, rest) = digits.split_at(1);
        if rest.is_empty() {
            format!("{lead}e{}", point - 1)
        } else {
            format!("{lead}.{rest}e{}", point - 1)
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_layout() {
        assert_eq!(0.5f64.to_decimal(), "0.5");
        assert_eq!((-2.0f64).to_decimal(), "-2");
        assert_eq!(1e-7f64.to_decimal(), "1e-7");
        assert_eq!(1.25e30f64.to_decimal(), "1.25e30");
        assert_eq!(123.456f64.to_decimal(), "123.456");
        assert_eq!(0.000123f64.to_decimal(), "0.000123");
        assert_eq!(Mp::<256>::from(0.5).to_decimal(), "0.5");
        assert_eq!(Mp::<256>::from(-3.0).to_decimal(), "-3");
    }

    #[test]
    fn shortest_round_trip() {
        for x in [0.1f64, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MAX, f64::MIN_POSITIVE] {
            let s = x.to_decimal();
            assert_eq!(f64::parse_decimal(&s), Some(x), "{s}");
            let m = Mp::<128>::from(x);
            assert_eq!(Mp::<128>::parse_decimal(&m.to_decimal()), Some(m));
        }
        let third = Mp::<256>::from(1.0) / Mp::<256>::from(3.0);
        let s = third.to_decimal();
        assert!(s.len() > 70 && s.len() < 85, "{s}");
        assert_eq!(Mp::<256>::parse_decimal(&s), Some(third));
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(f64::parse_decimal("inf"), None);
        assert_eq!(f64::parse_decimal("x"), None);
        assert!(Mp::<64>::parse_decimal("nan").is_none());
    }
}
