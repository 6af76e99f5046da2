//! Worst-first adaptive refinement over the Stern-Brocot cell tree.
//!
//! Shared by the measure quadrature and single Fourier coefficients. A
//! pool of Farey cells is kept in a max-heap keyed by per-cell error
//! bound; the worst cell is split at its mediant until the summed bound
//! reaches the tolerance or the cell budget runs out.
//!
//! Cell endpoints stay exact throughout. They are held in machine words
//! while the denominators fit in `u64` (the first overflow cannot happen
//! above depth 91) and promote to big rationals beyond that, so
//! refinement depth is limited by nothing but the budget.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::contfrac::{exp2_neg, Rational};

/// Exact endpoints of one pool cell.
#[derive(Debug, Clone)]
pub(crate) enum Ends {
    Machine { lp: u64, lq: u64, rp: u64, rq: u64 },
    Exact(Box<ExactEnds>),
}

#[derive(Debug, Clone)]
pub(crate) struct ExactEnds {
    left: Rational,
    right: Rational,
}

impl Ends {
    pub(crate) fn root() -> Self {
        Ends::Machine {
            lp: 0,
            lq: 1,
            rp: 1,
            rq: 1,
        }
    }

    /// Split at the mediant.
    pub(crate) fn split(&self) -> (Ends, Ends) {
        match self {
            Ends::Machine { lp, lq, rp, rq } => {
                match (lp.checked_add(*rp), lq.checked_add(*rq)) {
                    (Some(mp), Some(mq)) => (
                        Ends::Machine {
                            lp: *lp,
                            lq: *lq,
                            rp: mp,
                            rq: mq,
                        },
                        Ends::Machine {
                            lp: mp,
                            lq: mq,
                            rp: *rp,
                            rq: *rq,
                        },
                    ),
                    _ => self.to_exact().split(),
                }
            }
            Ends::Exact(e) => {
                let med = Rational::new_raw(
                    e.left.numer() + e.right.numer(),
                    e.left.denom() + e.right.denom(),
                );
                (
                    Ends::Exact(Box::new(ExactEnds {
                        left: e.left.clone(),
                        right: med.clone(),
                    })),
                    Ends::Exact(Box::new(ExactEnds {
                        left: med,
                        right: e.right.clone(),
                    })),
                )
            }
        }
    }

    fn to_exact(&self) -> Ends {
        match self {
            Ends::Machine { lp, lq, rp, rq } => Ends::Exact(Box::new(ExactEnds {
                left: Rational::new_raw(BigInt::from(*lp), BigInt::from(*lq)),
                right: Rational::new_raw(BigInt::from(*rp), BigInt::from(*rq)),
            })),
            e => e.clone(),
        }
    }

    /// Interval width; exactly `1 / (lq * rq)` by unimodularity.
    pub(crate) fn diameter(&self) -> f64 {
        match self {
            Ends::Machine { lq, rq, .. } => 1.0 / (*lq as f64 * *rq as f64),
            Ends::Exact(e) => crate::contfrac::rational_to_f64(&(&e.right - &e.left)),
        }
    }

    pub(crate) fn mediant_f64(&self) -> f64 {
        match self {
            Ends::Machine { lp, lq, rp, rq } => {
                (*lp as u128 + *rp as u128) as f64 / (*lq as u128 + *rq as u128) as f64
            }
            Ends::Exact(e) => {
                let med = Rational::new_raw(
                    e.left.numer() + e.right.numer(),
                    e.left.denom() + e.right.denom(),
                );
                crate::contfrac::rational_to_f64(&med)
            }
        }
    }

    /// Exact comparison of left endpoints.
    fn cmp_left(&self, other: &Ends) -> Ordering {
        match (self, other) {
            (
                Ends::Machine { lp, lq, .. },
                Ends::Machine {
                    lp: op, lq: oq, ..
                },
            ) => (*lp as u128 * *oq as u128).cmp(&(*op as u128 * *lq as u128)),
            _ => self.left_big().cmp(&other.left_big()),
        }
    }

    fn cmp_right(&self, other: &Ends) -> Ordering {
        match (self, other) {
            (
                Ends::Machine { rp, rq, .. },
                Ends::Machine {
                    rp: op, rq: oq, ..
                },
            ) => (*rp as u128 * *oq as u128).cmp(&(*op as u128 * *rq as u128)),
            _ => self.right_big().cmp(&other.right_big()),
        }
    }

    fn left_big(&self) -> Rational {
        match self {
            Ends::Machine { lp, lq, .. } => {
                Rational::new_raw(BigInt::from(*lp), BigInt::from(*lq))
            }
            Ends::Exact(e) => e.left.clone(),
        }
    }

    fn right_big(&self) -> Rational {
        match self {
            Ends::Machine { rp, rq, .. } => {
                Rational::new_raw(BigInt::from(*rp), BigInt::from(*rq))
            }
            Ends::Exact(e) => e.right.clone(),
        }
    }
}

struct Cell {
    ends: Ends,
    depth: u64,
    bound: f64,
    contrib: Complex64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    /// Worst bound first; ties resolved to the leftmost cell so refinement
    /// order, and with it the output, is fully deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.ends.cmp_left(&self.ends))
            .then_with(|| other.ends.cmp_right(&self.ends))
    }
}

pub(crate) struct QuadOutcome {
    pub value: Complex64,
    pub err_bound: f64,
    pub cells: u64,
    pub converged: bool,
}

/// Refines until the summed per-cell bound is at most `tol` or the pool
/// reaches `budget` cells.
///
/// `eval` is the integrand; `cell_bound(diameter, mass)` must bound
/// `mass * sup |f(x) - f(node)|` over the cell.
pub(crate) fn refine(
    eval: &dyn Fn(f64) -> Complex64,
    cell_bound: &dyn Fn(f64, f64) -> f64,
    tol: f64,
    budget: u64,
) -> QuadOutcome {
    let make = |ends: Ends, depth: u64| -> Cell {
        let mass = exp2_neg(depth);
        let bound = cell_bound(ends.diameter(), mass);
        let contrib = eval(ends.mediant_f64()) * mass;
        Cell {
            ends,
            depth,
            bound,
            contrib,
        }
    };

    let mut heap = BinaryHeap::new();
    heap.push(make(Ends::root(), 0));
    let mut total = Neumaier::default();
    total.add(heap.peek().expect("nonempty").bound);
    // shrinks whenever a paranoid re-sum disagrees with the running total
    let mut trigger = tol;

    loop {
        if total.sum() <= trigger {
            let (value, err_bound) = resum(&heap);
            if err_bound <= tol {
                return QuadOutcome {
                    value,
                    err_bound,
                    cells: heap.len() as u64,
                    converged: true,
                };
            }
            trigger *= 0.99;
            continue;
        }
        if heap.len() as u64 >= budget {
            let (value, err_bound) = resum(&heap);
            return QuadOutcome {
                value,
                err_bound,
                cells: heap.len() as u64,
                converged: err_bound <= tol,
            };
        }
        let worst = heap.pop().expect("pool is never empty");
        let (le, re) = worst.ends.split();
        let depth = worst.depth + 1;
        let lc = make(le, depth);
        let rc = make(re, depth);
        total.add(lc.bound);
        total.add(rc.bound);
        total.add(-worst.bound);
        heap.push(lc);
        heap.push(rc);
    }
}

/// Deterministic compensated re-summation of the pool, in cell order.
fn resum(heap: &BinaryHeap<Cell>) -> (Complex64, f64) {
    let mut cells: Vec<&Cell> = heap.iter().collect();
    cells.sort_unstable_by(|a, b| a.ends.cmp_left(&b.ends));
    let mut re = Neumaier::default();
    let mut im = Neumaier::default();
    let mut err = Neumaier::default();
    for c in cells {
        re.add(c.contrib.re);
        im.add(c.contrib.im);
        err.add(c.bound);
    }
    (Complex64::new(re.sum(), im.sum()), err.sum())
}

#[derive(Default)]
struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn sum(&self) -> f64 {
        self.s + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand_needs_one_cell() {
        let out = refine(&|_| Complex64::new(1.0, 0.0), &|_, _| 0.0, 1e-9, 100);
        assert_eq!(out.value.re, 1.0);
        assert_eq!(out.err_bound, 0.0);
        assert_eq!(out.cells, 1);
        assert!(out.converged);
    }

    #[test]
    fn identity_integrates_to_half() {
        // f(x) = x against mu; the measure is symmetric under x -> 1 - x
        let out = refine(
            &|x| Complex64::new(x, 0.0),
            &|diam, mass| mass * diam,
            1e-6,
            10_000_000,
        );
        assert!(out.converged);
        assert!(out.err_bound <= 1e-6);
        assert!((out.value.re - 0.5).abs() <= out.err_bound);
    }

    #[test]
    fn budget_is_respected() {
        let out = refine(
            &|x| Complex64::new(x, 0.0),
            &|diam, mass| mass * diam,
            1e-12,
            64,
        );
        assert!(!out.converged);
        assert!(out.cells <= 64);
        assert!(out.err_bound > 1e-12);
    }

    #[test]
    fn machine_cells_promote_cleanly() {
        // the golden spine has Fibonacci denominators and must promote to
        // exact endpoints near depth 92
        let mut e = Ends::root();
        for i in 0..120 {
            let (l, r) = e.split();
            e = if i % 2 == 0 { r } else { l };
        }
        assert!(matches!(e, Ends::Exact(_)));
        assert!(e.diameter() >= 0.0);
        assert!(e.mediant_f64() > 0.0);
    }

    #[test]
    fn neumaier_compensates() {
        let mut acc = Neumaier::default();
        acc.add(1e16);
        for _ in 0..10 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.sum(), 10.0);
    }
}
