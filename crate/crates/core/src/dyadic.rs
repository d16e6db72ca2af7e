//! Exact dyadic rationals `num / 2^exp`.
//!
//! Every coefficient produced by clause expansion and gadget penalties is a
//! dyadic rational, and so is every finite `f64`. Keeping them exact lets the
//! ground-state tests compare energies with `==` and makes CSV round-trips
//! lossless whenever the value fits an `f64` mantissa.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Upper bound on the denominator exponent; keeps products inside `i128`.
const MAX_EXP: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    /// `num / 2^exp`, normalized.
    pub fn new(num: i128, exp: u32) -> Self {
        Dyadic { num, exp }.normalized()
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic { num: v as i128, exp: 0 }
    }

    /// Exact conversion. Returns `None` for non-finite values or values whose
    /// binary exponent falls outside the supported range.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::ZERO);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (mant, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1i128 << 52), raw_exp - 1075)
        };
        if e >= 0 {
            if e > 60 {
                return None;
            }
            Some(Dyadic::new(sign * (mant << e), 0))
        } else {
            let shift = (-e) as u32;
            // strip trailing zero bits before range-checking the exponent
            let tz = mant.trailing_zeros().min(shift);
            let exp = shift - tz;
            if exp > MAX_EXP {
                return None;
            }
            Some(Dyadic::new(sign * (mant >> tz), exp))
        }
    }

    pub fn to_f64(self) -> f64 {
        // exact when num fits 53 bits, correctly rounded via two steps otherwise
        (self.num as f64) * 2f64.powi(-(self.exp as i32))
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn abs(self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn numerator(self) -> i128 {
        self.num
    }

    pub fn exponent(self) -> u32 {
        self.exp
    }

    /// Multiply by `2^-k`.
    pub fn halve(self, k: u32) -> Self {
        Dyadic::new(self.num, self.exp + k)
    }

    fn normalized(mut self) -> Self {
        if self.num == 0 {
            return Self::ZERO;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
        self
    }

    fn aligned(a: Self, b: Self) -> (i128, i128, u32) {
        let exp = a.exp.max(b.exp);
        let an = a
            .num
            .checked_shl(exp - a.exp)
            .filter(|v| v >> (exp - a.exp) == a.num)
            .expect("dyadic overflow");
        let bn = b
            .num
            .checked_shl(exp - b.exp)
            .filter(|v| v >> (exp - b.exp) == b.num)
            .expect("dyadic overflow");
        (an, bn, exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Self) -> Self {
        let (a, b, exp) = Dyadic::aligned(self, rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), exp)
    }
}

impl AddAssign for Dyadic {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Self {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Self) -> Self {
        let exp = self.exp + rhs.exp;
        assert!(exp <= 2 * MAX_EXP, "dyadic exponent overflow");
        Dyadic::new(self.num.checked_mul(rhs.num).expect("dyadic overflow"), exp)
    }
}

impl Mul<i64> for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: i64) -> Self {
        self * Dyadic::from_int(rhs)
    }
}

impl Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(*self, *other);
        a.cmp(&b)
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eighths_are_exact() {
        let c = Dyadic::new(-1, 3);
        assert_eq!(c.to_f64(), -0.125);
        assert_eq!(c + c, Dyadic::new(-1, 2));
        assert_eq!(c * 8, Dyadic::from_int(-1));
        assert_eq!(Dyadic::from_f64(2.5), Some(Dyadic::new(5, 1)));
    }

    #[test]
    fn from_f64_rejects_non_finite() {
        assert!(Dyadic::from_f64(f64::NAN).is_none());
        assert!(Dyadic::from_f64(f64::INFINITY).is_none());
        assert!(Dyadic::from_f64(1e300).is_none());
    }

    #[test]
    fn ordering() {
        assert!(Dyadic::new(1, 3) < Dyadic::new(1, 2));
        assert!(Dyadic::new(-3, 1) < Dyadic::ZERO);
    }

    proptest! {
        #[test]
        fn f64_roundtrip(v in -1.0e6f64..1.0e6) {
            let d = Dyadic::from_f64(v).unwrap();
            prop_assert_eq!(d.to_f64(), v);
        }

        #[test]
        fn add_matches_f64(a in -4096i64..4096, ea in 0u32..8, b in -4096i64..4096, eb in 0u32..8) {
            let x = Dyadic::new(a as i128, ea);
            let y = Dyadic::new(b as i128, eb);
            prop_assert_eq!((x + y).to_f64(), x.to_f64() + y.to_f64());
            prop_assert_eq!((x * y).to_f64(), x.to_f64() * y.to_f64());
        }
    }
}
