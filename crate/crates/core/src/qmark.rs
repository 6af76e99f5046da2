//! Forward and inverse Minkowski question mark function: exact on
//! rationals and dyadics, tolerance-controlled on doubles.
//!
//! The forward direction evaluates the alternating series
//! `?(x) = sum_k (-1)^(k-1) * 2^(1 - (a_1 + ... + a_k))` over the continued
//! fraction digits of x, which is a finite sum for rational x. The inverse
//! decodes the binary expansion of y back into run lengths of continued
//! fraction digits.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::contfrac::{cf_from_rational, rational_from_cf, rational_to_f64};
use crate::contfrac::{CFWord, Dyadic, Rational};
use crate::error::{Error, Result};

/// A double together with a guaranteed absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxReal {
    pub value: f64,
    /// Guaranteed bound on `|value - true value|`.
    pub err_bound: f64,
}

/// Slack added to every reported bound to cover double rounding in the
/// partial sums themselves.
const SUM_SLACK: f64 = 1e-14;

/// Exponents above this would need more bits than we are willing to
/// materialize for a single exact value.
const MAX_EXACT_BITS: u64 = 1 << 26;

/// The alternating series over an explicit word, exact.
///
/// Accepts non-canonical words; the sum over `[.., a, 1]` equals the sum
/// over `[.., a+1]`.
pub fn salem_sum(w: &CFWord) -> Result<Dyadic> {
    if w.is_empty() {
        return Ok(Dyadic::zero());
    }
    let total = w.digit_sum()?;
    if total - w.digits()[0] > MAX_EXACT_BITS {
        return Err(Error::ExponentOverflow);
    }
    // sum_k (-1)^(k-1) 2^(1 - s_k) = (sum_k (-1)^(k-1) 2^(s_n - s_k)) / 2^(s_n - 1)
    let mut num = BigInt::zero();
    let mut partial = 0u64;
    for (k, &a) in w.digits().iter().enumerate() {
        partial += a;
        let term = BigInt::one() << (total - partial);
        if k % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
    }
    Ok(Dyadic::new(num, total - 1))
}

/// `?(x)` for rational x in [0, 1], exact.
///
/// The result is a dyadic in [0, 1] whose exponent is the digit sum of the
/// continued fraction of x, minus one.
pub fn qmark_exact(x: &Rational) -> Result<Dyadic> {
    let w = cf_from_rational(x)?;
    salem_sum(&w)
}

/// `?(x)` for a double x in [0, 1], within `tol`.
///
/// The partial sum stops once the alternating tail bound `2^(1 - s_k)`
/// drops below `tol`; x is expanded as the exact rational the double
/// represents, so no error accrues in the digit stream itself.
pub fn qmark_approx(x: f64, tol: f64) -> Result<ApproxReal> {
    check_tol(tol)?;
    if !x.is_finite() {
        return Err(Error::NonFiniteInput(x));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutsideUnitInterval {
            value: x.to_string(),
        });
    }
    if x == 0.0 {
        return Ok(ApproxReal {
            value: 0.0,
            err_bound: 0.0,
        });
    }
    if x == 1.0 {
        return Ok(ApproxReal {
            value: 1.0,
            err_bound: 0.0,
        });
    }

    let exact = Rational::from_float(x).expect("finite double");
    let mut p = exact.numer().clone();
    let mut q = exact.denom().clone();
    let mut sum = 0.0f64;
    let mut s = 0u64; // running digit sum
    let mut k = 0usize;
    loop {
        if p.is_zero() {
            // expansion terminated: the partial sum is the exact value
            return Ok(ApproxReal {
                value: sum,
                err_bound: SUM_SLACK,
            });
        }
        let (a, r) = num_integer::Integer::div_rem(&q, &p);
        let next_s = a.to_u64().and_then(|a| s.checked_add(a));
        let Some(next_s) = next_s else {
            // the skipped term is below 2^-(2^64): far under any tolerance
            return Ok(ApproxReal {
                value: sum,
                err_bound: SUM_SLACK,
            });
        };
        s = next_s;
        let term = pow2(1i128 - s as i128);
        sum += if k.is_multiple_of(2) { term } else { -term };
        k += 1;
        q = p;
        p = r;
        if term < tol {
            // alternating tail after term k is at most half this term
            return Ok(ApproxReal {
                value: sum,
                err_bound: term / 2.0 + SUM_SLACK,
            });
        }
    }
}

/// Conway box function: the exact inverse of `?` on dyadics.
///
/// Decodes the terminating binary expansion of y: a leading run of `r_1`
/// zeros and subsequent alternating runs `r_2, ..., r_k` become the word
/// `[r_1 + 1, r_2, ..., r_k]`.
pub fn box_exact(y: &Dyadic) -> Result<Rational> {
    if y.is_negative() || *y > Dyadic::one() {
        return Err(Error::OutsideUnitInterval {
            value: y.to_string(),
        });
    }
    if y.is_zero() {
        return Ok(Rational::zero());
    }
    if *y == Dyadic::one() {
        return Ok(Rational::one());
    }
    let word = decode_runs(y)?;
    Ok(rational_from_cf(&word))
}

/// Run-length decode of the fractional bits of a normalized dyadic in (0, 1).
fn decode_runs(y: &Dyadic) -> Result<CFWord> {
    let n_bits = y.exponent();
    // the leading zero run is exp - bits(num); no need to walk it bit by bit
    let leading_zeros = n_bits - y.numer().bits();
    let mut digits: Vec<u64> = Vec::new();
    let mut current = false;
    let mut run = leading_zeros;
    for i in leading_zeros + 1..=n_bits {
        let bit = y.fraction_bit(i);
        if bit == current {
            run += 1;
        } else {
            digits.push(if digits.is_empty() { run + 1 } else { run });
            current = bit;
            run = 1;
        }
    }
    digits.push(if digits.is_empty() { run + 1 } else { run });
    CFWord::new(digits)
}

/// Box function for a double y in [0, 1], within `tol`.
///
/// Streams the binary digits of y, converting completed runs into
/// continued fraction digits, and stops as soon as the convergent interval
/// is narrower than `tol`.
pub fn box_approx(y: f64, tol: f64) -> Result<ApproxReal> {
    check_tol(tol)?;
    if !y.is_finite() {
        return Err(Error::NonFiniteInput(y));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::OutsideUnitInterval {
            value: y.to_string(),
        });
    }
    if y == 0.0 || y == 1.0 {
        return Ok(ApproxReal {
            value: y,
            err_bound: 0.0,
        });
    }

    let dy = Dyadic::from_rational(&Rational::from_float(y).expect("finite double"))
        .expect("doubles are dyadic");
    let n_bits = dy.exponent();

    // Convergent state for the word emitted so far.
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let mut p = BigInt::zero();
    let mut q = BigInt::one();
    let push = |digit: u64, p: &mut BigInt, q: &mut BigInt, pp: &mut BigInt, qp: &mut BigInt| {
        let a = BigInt::from(digit);
        let pn = &a * &*p + &*pp;
        let qn = &a * &*q + &*qp;
        *pp = std::mem::replace(p, pn);
        *qp = std::mem::replace(q, qn);
    };

    let mut current = false;
    let mut run = 0u64;
    let mut emitted = false;
    for i in 1..=n_bits {
        let bit = dy.fraction_bit(i);
        if bit == current {
            run += 1;
        } else {
            let digit = if emitted { run } else { run + 1 };
            push(digit, &mut p, &mut q, &mut p_prev, &mut q_prev);
            emitted = true;
            current = bit;
            run = 1;
            // cylinder width of the current word: 1 / (q_n (q_n + q_{n-1}))
            let width = 1.0 / (bigint_to_f64(&q) * bigint_to_f64(&(&q + &q_prev)));
            if width < tol {
                let med = Rational::new_raw(&p + &p_prev, &q + &q_prev);
                return Ok(ApproxReal {
                    value: rational_to_f64(&med),
                    err_bound: width,
                });
            }
        }
    }
    // digits exhausted: final run completes the word and the value is exact
    let digit = if emitted { run } else { run + 1 };
    push(digit, &mut p, &mut q, &mut p_prev, &mut q_prev);
    Ok(ApproxReal {
        value: rational_to_f64(&Rational::new_raw(p, q)),
        err_bound: SUM_SLACK,
    })
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let bits = n.bits();
    let drop = bits.saturating_sub(63);
    let top = (n >> drop).to_f64().expect("fits in 63 bits");
    if drop > 1200 {
        f64::INFINITY
    } else {
        top * (drop as f64).exp2()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

fn pow2(e: i128) -> f64 {
    if e < -1200 {
        0.0
    } else if e > 1200 {
        f64::INFINITY
    } else {
        (e as f64).exp2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::rat;

    fn dy(num: i64, exp: u64) -> Dyadic {
        Dyadic::new(BigInt::from(num), exp)
    }

    #[test]
    fn exact_values() {
        assert_eq!(qmark_exact(&rat(1, 2)).unwrap(), dy(1, 1));
        assert_eq!(qmark_exact(&rat(1, 3)).unwrap(), dy(1, 2));
        assert_eq!(qmark_exact(&rat(2, 5)).unwrap(), dy(3, 3));
        assert_eq!(qmark_exact(&rat(0, 1)).unwrap(), Dyadic::zero());
        assert_eq!(qmark_exact(&rat(1, 1)).unwrap(), Dyadic::one());
        assert_eq!(qmark_exact(&rat(2, 3)).unwrap(), dy(3, 2));
        assert!(qmark_exact(&rat(7, 5)).is_err());
    }

    #[test]
    fn exponent_is_digit_sum_minus_one() {
        for q in 1..=80i64 {
            for p in 1..=q {
                let x = rat(p, q);
                let w = cf_from_rational(&x).unwrap();
                let y = qmark_exact(&x).unwrap();
                assert_eq!(y.exponent(), w.digit_sum().unwrap() - 1);
            }
        }
    }

    #[test]
    fn salem_sum_ignores_canonical_form() {
        for (noncanon, canon) in [
            (vec![2u64, 1], vec![3u64]),
            (vec![1, 1], vec![2]),
            (vec![3, 2, 1], vec![3, 3]),
            (vec![1, 4, 2, 1], vec![1, 4, 3]),
        ] {
            let a = salem_sum(&CFWord::new(noncanon).unwrap()).unwrap();
            let b = salem_sum(&CFWord::new(canon).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn box_inverts_qmark() {
        assert_eq!(box_exact(&dy(1, 1)).unwrap(), rat(1, 2));
        assert_eq!(box_exact(&dy(1, 2)).unwrap(), rat(1, 3));
        assert_eq!(box_exact(&dy(3, 3)).unwrap(), rat(2, 5));
        assert_eq!(box_exact(&Dyadic::zero()).unwrap(), rat(0, 1));
        assert_eq!(box_exact(&Dyadic::one()).unwrap(), rat(1, 1));
        assert!(box_exact(&dy(5, 2)).is_err());
    }

    #[test]
    fn box_handles_sparse_wide_dyadics() {
        // 3/2^1000 decodes without walking the 998 leading zeros
        let y = Dyadic::new(BigInt::from(3), 1000);
        let x = box_exact(&y).unwrap();
        assert_eq!(x, Rational::new(BigInt::from(2), BigInt::from(1999)));
        assert_eq!(qmark_exact(&x).unwrap(), y);
    }

    #[test]
    fn round_trips_small() {
        for q in 1..=80i64 {
            for p in 0..=q {
                let x = rat(p, q);
                assert_eq!(box_exact(&qmark_exact(&x).unwrap()).unwrap(), x);
            }
        }
        for exp in 0..=12u64 {
            for num in 0..=(1i64 << exp) {
                let y = Dyadic::new(BigInt::from(num), exp);
                assert_eq!(qmark_exact(&box_exact(&y).unwrap()).unwrap(), y);
            }
        }
    }

    #[test]
    fn strictly_monotone_on_farey_200() {
        let mut fractions = Vec::new();
        for q in 1..=200i64 {
            for p in 0..=q {
                let x = rat(p, q);
                if *x.denom() == num_bigint::BigInt::from(q) || p == 0 {
                    fractions.push(x);
                }
            }
        }
        fractions.sort_unstable();
        fractions.dedup();
        let mut prev = None;
        for x in &fractions {
            let y = qmark_exact(x).unwrap();
            if let Some(p) = prev {
                assert!(p < y, "? not strictly increasing before {x}");
            }
            prev = Some(y);
        }
    }

    #[test]
    fn approx_golden_ratio() {
        let x = (5.0f64.sqrt() - 1.0) / 2.0;
        let got = qmark_approx(x, 1e-9).unwrap();
        assert!(got.err_bound <= 1e-9);
        assert!((got.value - 2.0 / 3.0).abs() <= got.err_bound + 1e-12);
    }

    #[test]
    fn approx_sqrt2() {
        let x = 2.0f64.sqrt() - 1.0;
        let got = qmark_approx(x, 1e-9).unwrap();
        assert!((got.value - 2.0 / 5.0).abs() <= got.err_bound + 1e-12);
    }

    #[test]
    fn approx_agrees_with_exact() {
        let got = qmark_approx(1.0 / 3.0, 1e-12).unwrap();
        // 1/3 as a double is not exactly 1/3; the tolerance dominates both gaps
        assert!((got.value - 0.25).abs() < 1e-9);

        // dyadic doubles with small denominators, where the exact path is cheap
        for x in [0.5, 0.375, 0.0078125, 0.6875, 0.33203125] {
            let got = qmark_approx(x, 1e-12).unwrap();
            let want = qmark_exact(&Rational::from_float(x).unwrap())
                .unwrap()
                .to_f64();
            assert!((got.value - want).abs() <= 1e-12, "x = {x}");
        }
    }

    #[test]
    fn box_approx_inverts() {
        let got = box_approx(2.0 / 3.0, 1e-9).unwrap();
        assert!((got.value - (5.0f64.sqrt() - 1.0) / 2.0).abs() <= 1e-8);

        let got = box_approx(0.25, 1e-12).unwrap();
        assert!((got.value - 1.0 / 3.0).abs() <= 1e-12);

        assert_eq!(box_approx(1.0, 1e-6).unwrap().value, 1.0);
        assert_eq!(box_approx(0.0, 1e-6).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(qmark_approx(0.5, 0.0).is_err());
        assert!(qmark_approx(0.5, -1.0).is_err());
        assert!(qmark_approx(f64::NAN, 1e-6).is_err());
        assert!(qmark_approx(1.5, 1e-6).is_err());
        assert!(box_approx(-0.1, 1e-6).is_err());
    }
}
