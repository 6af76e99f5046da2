//! Fourier-Stieltjes coefficients of mu with certified error bounds, and
//! empirical estimation of the polynomial decay exponent.
//!
//! The convention is `mu_hat(n) = integral of exp(-2 pi i n x) d mu(x)`
//! over integer frequencies n. Since mu is symmetric under `x -> 1 - x`
//! the true coefficients are real; the imaginary parts the quadrature
//! reports are a free consistency check against the error bound.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::{front, nufft, quad};

/// One row of the coefficient table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierCoefficient {
    pub n: i64,
    pub re: f64,
    pub im: f64,
    /// Certified bound on the distance to the true coefficient.
    pub err_bound: f64,
}

impl FourierCoefficient {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Computes `mu_hat(n)` by adaptive Farey-cell quadrature.
///
/// A depth-m cell contributes `exp(-2 pi i n * mediant) * 2^-m` and
/// carries the bound `2^-m * min(2, pi |n| diam)`: the unimodular
/// exponential never strays more than 2 from its value at the node, and
/// the mediant is the mu-median of the cell, which halves the Lipschitz
/// term. `mu_hat(0)` is returned exactly as 1.
pub fn fourier_coeff(n: i64, tol: f64, budget: u64) -> Result<FourierCoefficient> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if n == 0 {
        return Ok(FourierCoefficient {
            n: 0,
            re: 1.0,
            im: 0.0,
            err_bound: 0.0,
        });
    }
    let omega = -2.0 * std::f64::consts::PI * n as f64;
    let eval = move |x: f64| {
        let (s, c) = (omega * x).sin_cos();
        Complex64::new(c, s)
    };
    let half_lip = std::f64::consts::PI * (n.unsigned_abs() as f64);
    let cell_bound = move |diam: f64, mass: f64| mass * (half_lip * diam).min(2.0);
    let out = quad::refine(&eval, &cell_bound, tol, budget);
    let coeff = FourierCoefficient {
        n,
        re: out.value.re,
        im: out.value.im,
        err_bound: out.err_bound,
    };
    if !out.converged {
        return Err(Error::CoeffBudgetExhausted {
            budget,
            partial: coeff,
        });
    }
    Ok(coeff)
}

/// Widest frequency the batched path will plan a grid for.
const MAX_BATCH_FREQ: u64 = 1 << 21;
/// Below this tolerance the batched path cannot certify its evaluation
/// slack and rows fall back to individual quadratures.
const MIN_BATCH_TOL: f64 = 1e-8;
/// Headroom between the front target and the tolerance, absorbing the
/// conservative binning of the per-row bound histogram.
const HIST_HEADROOM: f64 = 1.05;

/// Coefficients for every `n` in `[n_min, n_max]`, in order of `n`.
///
/// Wide tables share one refinement front: the front is refined for the
/// largest requested frequency, which certifies every smaller one at the
/// same time (the per-cell bound is monotone in `|n|`), and all rows are
/// then read off a single nonuniform FFT over the front nodes. Narrow,
/// extreme-frequency, or ultra-tight requests run the per-coefficient
/// quadrature instead, in parallel.
///
/// A budget failure is reported in the affected rows, with the partial
/// values, without aborting the table.
pub fn coeff_table(
    n_min: i64,
    n_max: i64,
    tol: f64,
    budget: u64,
) -> Result<Vec<Result<FourierCoefficient>>> {
    if n_min > n_max {
        return Err(Error::InvalidRange {
            lo: n_min,
            hi: n_max,
        });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let n_abs = n_min.unsigned_abs().max(n_max.unsigned_abs());
    let width = (n_max as i128 - n_min as i128 + 1) as u64;
    if n_abs == 0 || width <= 4 || n_abs > MAX_BATCH_FREQ || tol < MIN_BATCH_TOL {
        return Ok((n_min..=n_max)
            .into_par_iter()
            .map(|n| fourier_coeff(n, tol, budget))
            .collect());
    }

    let half_lip = std::f64::consts::PI * n_abs as f64;
    let target = (tol - nufft::EVAL_MARGIN) / HIST_HEADROOM;
    let beta = front::choose_beta(half_lip, target, budget);

    let mut hist = BoundHist::new();
    let mut plan = nufft::Nufft::new(n_abs);
    front::walk_front(half_lip, beta, budget, |x, mass, diam| {
        hist.record(mass, diam);
        plan.spread(x, mass);
    });
    let spectrum = plan.finish();
    let bounds = hist.finish();

    Ok((n_min..=n_max)
        .map(|n| {
            if n == 0 {
                return Ok(FourierCoefficient {
                    n: 0,
                    re: 1.0,
                    im: 0.0,
                    err_bound: 0.0,
                });
            }
            let v = spectrum.mode(n);
            let err_bound = bounds.for_frequency(n) + nufft::EVAL_MARGIN;
            let coeff = FourierCoefficient {
                n,
                re: v.re,
                im: v.im,
                err_bound,
            };
            if err_bound <= tol {
                Ok(coeff)
            } else {
                Err(Error::CoeffBudgetExhausted {
                    budget,
                    partial: coeff,
                })
            }
        })
        .collect())
}

/// Sixteenth-of-an-octave bins per cell diameter.
const BINS_PER_OCTAVE: f64 = 16.0;
const N_BINS: usize = 20_000;

/// Mass histogram over cell diameters, from which the certified bound
/// `sum_c mass_c * min(2, pi |n| diam_c)` is reproduced for every row
/// without another pass over the front. Diameters round up to their bin
/// edge, so the reproduced bound is conservative by at most `2^(1/16)`.
struct BoundHist {
    mass: Vec<f64>,
    mass_diam: Vec<f64>,
}

impl BoundHist {
    fn new() -> Self {
        BoundHist {
            mass: vec![0.0; N_BINS],
            mass_diam: vec![0.0; N_BINS],
        }
    }

    #[inline]
    fn record(&mut self, mass: f64, diam: f64) {
        let b = if diam >= 1.0 {
            0
        } else {
            ((-diam.log2() * BINS_PER_OCTAVE) as usize).min(N_BINS - 1)
        };
        self.mass[b] += mass;
        self.mass_diam[b] += mass * upper_diam(b);
    }

    fn finish(self) -> RowBounds {
        let mut capped_mass = Vec::with_capacity(N_BINS);
        let mut lipschitz_tail = vec![0.0; N_BINS + 1];
        let mut acc = 0.0;
        for b in 0..N_BINS {
            acc += self.mass[b];
            capped_mass.push(acc);
        }
        for b in (0..N_BINS).rev() {
            lipschitz_tail[b] = lipschitz_tail[b + 1] + self.mass_diam[b];
        }
        RowBounds {
            capped_mass,
            lipschitz_tail,
        }
    }
}

fn upper_diam(b: usize) -> f64 {
    (-(b as f64) / BINS_PER_OCTAVE).exp2()
}

struct RowBounds {
    /// Cumulative mass of bins at least as wide as each bin edge.
    capped_mass: Vec<f64>,
    /// Suffix sums of mass times (upper) diameter.
    lipschitz_tail: Vec<f64>,
}

impl RowBounds {
    /// `sum_b mass_b * min(2, pi |n| d_b)`, split at the diameter where
    /// the oscillation cap takes over.
    fn for_frequency(&self, n: i64) -> f64 {
        let half_lip = std::f64::consts::PI * n.unsigned_abs() as f64;
        // bins with upper diameter >= 2 / half_lip are capped at 2
        let threshold = 2.0 / half_lip;
        let split = if threshold >= 1.0 {
            0
        } else {
            (((-threshold.log2()) * BINS_PER_OCTAVE).floor() as usize + 1).min(N_BINS)
        };
        let capped = if split == 0 {
            0.0
        } else {
            2.0 * self.capped_mass[split - 1]
        };
        capped + half_lip * self.lipschitz_tail[split]
    }
}

/// Fitted decay exponent with its regression diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayEstimate {
    /// Exponent eta in `|mu_hat(n)| ~ n^-eta`: minus the slope of the
    /// least squares fit of `ln M_j` against `j ln 2`.
    pub eta: f64,
    pub intercept: f64,
    /// `(j, max |mu_hat(n)| over n in [2^j, 2^(j+1)))` per block.
    pub block_maxima: Vec<(u32, f64)>,
    /// Root mean square residual of the log fit.
    pub residual: f64,
}

/// Fits the decay exponent from dyadic block maxima of `|mu_hat|`.
///
/// Block maxima are used instead of pointwise values because individual
/// coefficients oscillate and can nearly vanish, which would corrupt a
/// log fit; the envelope tracks the claimed power decay directly.
pub fn fit_decay(
    table: &[FourierCoefficient],
    j_min: u32,
    j_max: u32,
) -> Result<DecayEstimate> {
    if j_min > j_max || j_max >= 63 {
        return Err(Error::InvalidRange {
            lo: j_min as i64,
            hi: j_max as i64,
        });
    }
    if j_min == j_max {
        return Err(Error::IllConditioned(
            "decay fit needs at least two blocks".into(),
        ));
    }

    let mut block_maxima = Vec::with_capacity((j_max - j_min + 1) as usize);
    for j in j_min..=j_max {
        let lo = 1i64 << j;
        let hi = 1i64 << (j + 1);
        let mut best: Option<&FourierCoefficient> = None;
        let mut seen = vec![false; (hi - lo) as usize];
        for c in table.iter().filter(|c| c.n >= lo && c.n < hi) {
            seen[(c.n - lo) as usize] = true;
            if best.is_none_or(|b| c.abs() > b.abs()) {
                best = Some(c);
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::IncompleteTable {
                n: lo + missing as i64,
            });
        }
        let best = best.expect("block is nonempty");
        let m = best.abs();
        if m <= 0.0 || m <= best.err_bound {
            return Err(Error::IllConditioned(format!(
                "block maximum for j = {j} is indistinguishable from zero \
                 ({m} with bound {})",
                best.err_bound
            )));
        }
        block_maxima.push((j, m));
    }

    // ordinary least squares of ln M_j against x_j = j ln 2
    let ln2 = std::f64::consts::LN_2;
    let pts: Vec<(f64, f64)> = block_maxima
        .iter()
        .map(|&(j, m)| (j as f64 * ln2, m.ln()))
        .collect();
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let residual = (ss_res / n).sqrt();
    Ok(DecayEstimate {
        eta: -slope,
        intercept,
        block_maxima,
        residual,
    })
}
