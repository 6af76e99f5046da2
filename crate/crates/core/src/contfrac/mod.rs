//! Exact rational and continued-fraction arithmetic, Gauss cylinders, and
//! the Stern-Brocot cell tree that drives all quadrature in this crate.
//!
//! Everything here is exact big-integer arithmetic: Farey denominators grow
//! Fibonacci-fast, so doubles stop being able to tell neighbouring endpoints
//! apart long before the quadrature front gets interesting.

mod dyadic;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use dyadic::Dyadic;

use crate::error::{Error, Result};

/// Exact fraction with arbitrary-precision numerator and denominator,
/// always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for small rationals, mostly used in tests and examples.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest double, correct to one rounding even when numerator and
/// denominator are far outside the range of `f64`.
pub fn rational_to_f64(r: &Rational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits();
    let db = den.bits();
    let ndrop = nb.saturating_sub(63);
    let ddrop = db.saturating_sub(63);
    let top_n = (num >> ndrop).to_f64().expect("fits in 63 bits");
    let top_d = (den >> ddrop).to_f64().expect("fits in 63 bits");
    let scale = ndrop as i128 - ddrop as i128;
    if scale < -1200 {
        return 0.0;
    }
    if scale > 1200 {
        return f64::copysign(f64::INFINITY, top_n);
    }
    (top_n / top_d) * (scale as f64).exp2()
}

fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

fn outside_unit(x: &Rational) -> Error {
    Error::OutsideUnitInterval {
        value: x.to_string(),
    }
}

/// A finite continued fraction word `[0; a_1, ..., a_n]` with every
/// partial quotient `a_i >= 1`.
///
/// The canonical form produced by [`cf_from_rational`] has last digit >= 2
/// (except for the word `[1]`, which denotes x = 1); consumers accept
/// non-canonical words as well, so `[.., a, 1]` and `[.., a+1]` address the
/// same rational. The empty word denotes x = 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CFWord {
    digits: Vec<u64>,
}

impl CFWord {
    /// Validates that every digit is at least 1.
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if digits.contains(&0) {
            return Err(Error::InvalidCfDigit);
        }
        Ok(CFWord { digits })
    }

    /// The expansion of x = 0.
    pub fn empty() -> Self {
        CFWord { digits: Vec::new() }
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        match self.digits.as_slice() {
            [] | [1] => true,
            [.., last] => *last >= 2,
        }
    }

    /// Sum of the partial quotients; the Stern-Brocot depth of the cylinder.
    pub fn digit_sum(&self) -> Result<u64> {
        self.digits
            .iter()
            .try_fold(0u64, |s, &a| s.checked_add(a))
            .ok_or(Error::ExponentOverflow)
    }

    /// The word followed by one more digit.
    pub fn extended(&self, digit: u64) -> Result<Self> {
        if digit == 0 {
            return Err(Error::InvalidCfDigit);
        }
        let mut digits = self.digits.clone();
        digits.push(digit);
        Ok(CFWord { digits })
    }
}

impl fmt::Display for CFWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.digits.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

/// Continued fraction expansion of a rational in [0, 1], in canonical form.
///
/// x = 0 yields the empty word and x = 1 yields `[1]`; every other rational
/// gets the word the Euclidean algorithm produces, whose last digit is
/// automatically >= 2.
pub fn cf_from_rational(x: &Rational) -> Result<CFWord> {
    if !in_unit_interval(x) {
        return Err(outside_unit(x));
    }
    if x.is_zero() {
        return Ok(CFWord::empty());
    }
    if x.is_one() {
        return CFWord::new(vec![1]);
    }
    let mut digits = Vec::new();
    // x = p/q in (0, 1); 1/x = q/p = a + r/p with 0 <= r < p.
    let mut p = x.numer().clone();
    let mut q = x.denom().clone();
    while !p.is_zero() {
        let (a, r) = q.div_rem(&p);
        digits.push(a.to_u64().ok_or(Error::ExponentOverflow)?);
        q = p;
        p = r;
    }
    CFWord::new(digits)
}

/// Value of a continued fraction word via the convergent recursion
/// `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}`.
///
/// Accepts non-canonical words; `[.., a, 1]` and `[.., a+1]` give the same
/// rational. The result is automatically in lowest terms.
pub fn rational_from_cf(w: &CFWord) -> Rational {
    let (conv, _prev) = convergents(w);
    conv
}

/// Final two convergents `(p_n/q_n, p_{n-1}/q_{n-1})` of a word.
fn convergents(w: &CFWord) -> (Rational, Rational) {
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let mut p = BigInt::zero();
    let mut q = BigInt::one();
    for &a in w.digits() {
        let a = BigInt::from(a);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    // gcd(p, q) = 1 by unimodularity, so no reduction happens here.
    (
        Rational::new_raw(p, q),
        Rational::new_raw(p_prev, q_prev),
    )
}

/// A Stern-Brocot interval: unimodular rational endpoints and exact
/// mu-mass `2^-depth`.
///
/// Gauss cylinders are half-open `(left, right]`; for quadrature the cells
/// are treated as closed, which costs nothing because the measure is
/// atomless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyCell {
    left: Rational,
    right: Rational,
    depth: u64,
}

impl FareyCell {
    /// The whole interval `(0/1, 1/1)` at depth 0, mass 1.
    pub fn root() -> Self {
        FareyCell {
            left: Rational::zero(),
            right: Rational::one(),
            depth: 0,
        }
    }

    /// Validates order and the unimodularity relation `p'q - pq' = 1`.
    pub fn new(left: Rational, right: Rational, depth: u64) -> Result<Self> {
        if left >= right {
            return Err(Error::ReversedInterval {
                a: left.to_string(),
                b: right.to_string(),
            });
        }
        let det = right.numer() * left.denom() - left.numer() * right.denom();
        if !det.is_one() {
            return Err(Error::NotUnimodular {
                left: left.to_string(),
                right: right.to_string(),
            });
        }
        Ok(FareyCell { left, right, depth })
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn right(&self) -> &Rational {
        &self.right
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    /// `(p + p') / (q + q')`: the new boundary after a split, and the
    /// mu-median of the cell.
    pub fn mediant(&self) -> Rational {
        // The mediant of a unimodular pair is already in lowest terms.
        Rational::new_raw(
            self.left.numer() + self.right.numer(),
            self.left.denom() + self.right.denom(),
        )
    }

    /// Splits at the mediant. The children partition the cell and each
    /// carries exactly half its mass.
    pub fn split(&self) -> (FareyCell, FareyCell) {
        let med = self.mediant();
        let depth = self.depth + 1;
        (
            FareyCell {
                left: self.left.clone(),
                right: med.clone(),
                depth,
            },
            FareyCell {
                left: med,
                right: self.right.clone(),
                depth,
            },
        )
    }

    /// Exact mass `2^-depth`.
    pub fn mass(&self) -> Dyadic {
        Dyadic::pow2_neg(self.depth)
    }

    pub fn mass_f64(&self) -> f64 {
        exp2_neg(self.depth)
    }

    pub fn diameter(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn is_unimodular(&self) -> bool {
        (self.right.numer() * self.left.denom() - self.left.numer() * self.right.denom()).is_one()
    }
}

pub(crate) fn exp2_neg(depth: u64) -> f64 {
    if depth > 1100 {
        0.0
    } else {
        (-(depth as f64)).exp2()
    }
}

/// The interval of all x in [0, 1] whose continued fraction expansion
/// begins with `w`, as a Farey cell of depth `a_1 + ... + a_n` (hence with
/// exact mass `2^-(a_1 + ... + a_n)`).
///
/// The endpoints are the last convergent `p_n/q_n` and the mediant
/// `(p_n + p_{n-1}) / (q_n + q_{n-1})`; which one is the right endpoint
/// depends on the parity of the word length.
pub fn gauss_cylinder(w: &CFWord) -> Result<FareyCell> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let depth = w.digit_sum()?;
    let (conv, prev) = convergents(w);
    let med = Rational::new_raw(
        conv.numer() + prev.numer(),
        conv.denom() + prev.denom(),
    );
    let (left, right) = if w.len() % 2 == 1 {
        (med, conv)
    } else {
        (conv, med)
    };
    debug_assert!(left < right);
    Ok(FareyCell { left, right, depth })
}

/// Splits a cell at its mediant; children have depth `m + 1` and mass
/// `2^-(m+1)` each. Free-function form of [`FareyCell::split`].
pub fn farey_split(cell: &FareyCell) -> (FareyCell, FareyCell) {
    cell.split()
}
