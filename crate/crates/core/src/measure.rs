//! The Stieltjes measure mu = d?: exact interval masses, adaptive
//! quadrature with certified error bounds, the dimension integral,
//! Bernoulli sampling of continued fraction digits, and the Gauss map.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contfrac::{rational_from_cf, CFWord, Dyadic, Rational};
use crate::error::{Error, Result};
use crate::qmark::qmark_exact;
use crate::quad;

/// Default ceiling on the number of cells one quadrature may hold.
pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

/// Exact mass `mu((a, b]) = ?(b) - ?(a)`.
pub fn mu_interval(a: &Rational, b: &Rational) -> Result<Dyadic> {
    if a > b {
        return Err(Error::ReversedInterval {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok(&qmark_exact(b)? - &qmark_exact(a)?)
}

/// A real integrand with the metadata the error certificate needs.
///
/// `lipschitz` must satisfy `|f(a) - f(b)| <= lipschitz * |a - b|` on
/// [0, 1]; `osc_cap`, when given, bounds `|f(a) - f(b)|` outright (useful
/// for bounded oscillatory integrands where the Lipschitz term is useless
/// on wide cells).
pub struct Integrand<F: Fn(f64) -> f64> {
    eval: F,
    lipschitz: f64,
    osc_cap: Option<f64>,
}

impl<F: Fn(f64) -> f64> Integrand<F> {
    pub fn new(eval: F, lipschitz: f64) -> Result<Self> {
        if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidLipschitz(lipschitz));
        }
        Ok(Integrand {
            eval,
            lipschitz,
            osc_cap: None,
        })
    }

    pub fn with_osc_cap(mut self, osc_cap: f64) -> Result<Self> {
        if !(osc_cap > 0.0 && osc_cap.is_finite()) {
            return Err(Error::InvalidOscCap(osc_cap));
        }
        self.osc_cap = Some(osc_cap);
        Ok(self)
    }
}

/// Outcome of an adaptive quadrature against mu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Certified bound on `|value - integral|`, valid whenever the
    /// integrand metadata is.
    pub err_bound: f64,
    pub cells_used: u64,
}

/// Integrates `f` against mu with a certified error bound.
///
/// Maintains a worst-first pool of Farey cells from the root `(0/1, 1/1)`.
/// A cell of depth m contributes `f(mediant) * 2^-m` and carries the error
/// bound `min(lipschitz * diam, osc_cap) * 2^-m`; the worst cell is split
/// until the summed bound is at most `tol`.
pub fn integrate_mu<F: Fn(f64) -> f64>(
    f: &Integrand<F>,
    tol: f64,
    budget: u64,
) -> Result<QuadratureResult> {
    check_tol(tol)?;
    let lip = f.lipschitz;
    let osc = f.osc_cap.unwrap_or(f64::INFINITY);
    let eval = |x: f64| Complex64::new((f.eval)(x), 0.0);
    let cell_bound = move |diam: f64, mass: f64| mass * (lip * diam).min(osc);
    let out = quad::refine(&eval, &cell_bound, tol, budget);
    let result = QuadratureResult {
        value: out.value.re,
        err_bound: out.err_bound,
        cells_used: out.cells,
    };
    if !out.converged {
        return Err(Error::BudgetExhausted {
            budget,
            partial: result,
        });
    }
    Ok(result)
}

/// Hausdorff dimension of mu via the integral
/// `dim = 1 / (2 * I)` with `I = integral of log2(1 + x) d mu(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub dim: f64,
    /// `integral.err_bound / (2 * integral.value^2)`.
    pub err_bound: f64,
    pub integral: QuadratureResult,
}

/// `log2(1 + x)` with its global Lipschitz constant on [0, 1], which is
/// the derivative at 0: `1 / ln 2`.
pub fn dimension_integrand() -> Integrand<impl Fn(f64) -> f64> {
    Integrand::new(|x: f64| (1.0 + x).log2(), std::f64::consts::LN_2.recip())
        .expect("constant is valid")
}

/// Computes the dimension of mu to roughly `tol` (the tolerance is passed
/// to the underlying integral; the dimension bound is propagated from it).
pub fn kinney_dimension(tol: f64, budget: u64) -> Result<DimensionEstimate> {
    let integral = integrate_mu(&dimension_integrand(), tol, budget)?;
    dimension_from_integral(&integral)
}

/// First-order error propagation through `I -> 1/(2I)`, requiring the
/// integral bracket to stay away from zero.
pub fn dimension_from_integral(integral: &QuadratureResult) -> Result<DimensionEstimate> {
    if integral.value - integral.err_bound <= 0.0 {
        return Err(Error::IllConditioned(format!(
            "integral bracket [{} - {}] touches zero",
            integral.value, integral.err_bound
        )));
    }
    let dim = 1.0 / (2.0 * integral.value);
    let err_bound = integral.err_bound / (2.0 * integral.value * integral.value);
    Ok(DimensionEstimate {
        dim,
        err_bound,
        integral: *integral,
    })
}

/// Draws from mu by sampling continued fraction digits independently with
/// the Bernoulli weights `P(a = k) = 2^-k`.
///
/// Digits come from counting fair coin flips up to and including the first
/// head, so the geometric weights are exact and the stream is fully
/// determined by the seed.
pub struct MuSampler {
    rng: ChaCha8Rng,
}

impl MuSampler {
    pub fn new(seed: u64) -> Self {
        MuSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// One sample: digits are drawn until the cylinder mass `2^-(sum a_i)`
    /// falls below `mass_tol`, and the convergent of the word is returned.
    pub fn sample(&mut self, mass_tol: f64) -> Result<Rational> {
        Ok(rational_from_cf(&self.sample_word(mass_tol)?))
    }

    /// The digit word behind one sample.
    pub fn sample_word(&mut self, mass_tol: f64) -> Result<CFWord> {
        if !(mass_tol > 0.0 && mass_tol < 1.0) {
            return Err(Error::InvalidMassTolerance(mass_tol));
        }
        let mut digits = Vec::new();
        let mut sum = 0u64;
        loop {
            let mut a = 1u64;
            while !self.rng.random::<bool>() {
                a += 1;
            }
            digits.push(a);
            sum = sum.saturating_add(a);
            if crate::contfrac::exp2_neg(sum) < mass_tol {
                return CFWord::new(digits);
            }
        }
    }
}

/// Convenience single draw.
pub fn sample_mu(seed: u64, mass_tol: f64) -> Result<Rational> {
    MuSampler::new(seed).sample(mass_tol)
}

/// The Gauss map `G(x) = 1/x mod 1` on rationals, with `G(0) = 0`.
///
/// Shifts the continued fraction expansion by one digit.
pub fn gauss_map(x: &Rational) -> Result<Rational> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::OutsideUnitInterval {
            value: x.to_string(),
        });
    }
    if x.is_zero() {
        return Ok(Rational::zero());
    }
    let recip = x.recip();
    Ok(&recip - recip.floor())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}
