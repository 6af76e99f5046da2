//! Exact dyadic rationals `num / 2^exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::contfrac::Rational;

/// An exact dyadic rational `num / 2^exp`.
///
/// Kept normalized: `num` is odd or zero, and `exp` is 0 when `num` is zero,
/// so equality and hashing are structural. These are the values taken by the
/// question mark function on rationals and the masses of Farey cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    /// Builds `num / 2^exp` and normalizes.
    pub fn new(num: BigInt, exp: u64) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: 0,
        }
    }

    /// The cell mass `2^-k`.
    pub fn pow2_neg(k: u64) -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: k,
        }
    }

    /// Converts an exact rational whose denominator is a power of two.
    /// Returns `None` otherwise.
    pub fn from_rational(r: &Rational) -> Option<Self> {
        let den = r.denom();
        let k = den.trailing_zeros().expect("denominator is nonzero");
        if !(den >> k).is_one() {
            return None;
        }
        Some(Dyadic::new(r.numer().clone(), k))
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    /// Exact halving (`exp + 1`).
    pub fn half(&self) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            num: self.num.clone(),
            exp: self.exp.checked_add(1).expect("dyadic exponent overflow"),
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    /// Nearest double, correct to one rounding of the quotient even when the
    /// numerator or exponent is far outside the range of `f64`.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits();
        let drop = bits.saturating_sub(54);
        let top = (&self.num >> drop).to_f64().expect("fits in 54 bits");
        let scale = drop as i128 - self.exp as i128;
        top * exp2_clamped(scale)
    }

    /// Fractional binary digit `b_i` (1-indexed from the binary point), for
    /// values in [0, 1).
    pub(crate) fn fraction_bit(&self, i: u64) -> bool {
        debug_assert!(i >= 1 && i <= self.exp);
        self.num.bit(self.exp - i)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exp);
        if shift > 0 {
            self.num >>= shift;
            self.exp -= shift;
        }
    }
}

fn exp2_clamped(e: i128) -> f64 {
    if e < -1200 {
        0.0
    } else if e > 1200 {
        f64::INFINITY
    } else {
        (e as f64).exp2()
    }
}

/// Aligns two dyadics to a common exponent.
fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, u64) {
    let exp = a.exp.max(b.exp);
    let na = &a.num << (exp - a.exp);
    let nb = &b.num << (exp - b.exp);
    (na, nb, exp)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (na, nb, exp) = aligned(self, rhs);
        Dyadic::new(na + nb, exp)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (na, nb, exp) = aligned(self, rhs);
        Dyadic::new(na - nb, exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (na, nb, _) = aligned(self, other);
        na.cmp(&nb)
    }
}

// Denominators are printed in digits ("3/8") so the text form round-trips
// through ordinary fraction parsing; absurdly large exponents fall back to
// the symbolic form.
const MAX_PRINTED_EXP: u64 = 16_384;

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else if self.exp <= MAX_PRINTED_EXP {
            write!(f, "{}/{}", self.num, BigInt::one() << self.exp)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}
