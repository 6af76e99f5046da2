//! Depth-first construction of the quadrature front shared by a whole
//! coefficient table.
//!
//! The worst-first pool of [`crate::quad`] equalizes per-cell bounds: its
//! final state is exactly the set of cells whose bound is at most some
//! threshold beta while the parent's was not. That front can be walked
//! depth-first in O(depth) memory once beta is known, which is what makes
//! tables to large frequencies affordable: beta is located by a handful of
//! counting passes, then a single pass streams the leaves out.

use crate::contfrac::exp2_neg;
use crate::quad::Ends;

/// One front pass. `on_leaf(node, mass, diameter)` is called for every
/// leaf in left-to-right order.
pub(crate) struct WalkStats {
    pub leaves: u64,
    /// Total of the per-cell bounds `mass * min(2, half_lip * diam)`.
    pub bound_sum: f64,
    /// The budget stopped at least one split.
    pub truncated: bool,
}

pub(crate) fn walk_front(
    half_lip: f64,
    beta: f64,
    budget: u64,
    mut on_leaf: impl FnMut(f64, f64, f64),
) -> WalkStats {
    let mut stats = WalkStats {
        leaves: 0,
        bound_sum: 0.0,
        truncated: false,
    };
    let mut splits_left = budget.saturating_sub(1);
    let mut bound_acc = 0.0f64;
    let mut bound_comp = 0.0f64;
    // right child pushed first so leaves stream left to right
    let mut stack: Vec<(Ends, u64)> = vec![(Ends::root(), 0)];
    while let Some((ends, depth)) = stack.pop() {
        let diam = ends.diameter();
        let mass = exp2_neg(depth);
        let bound = mass * (half_lip * diam).min(2.0);
        if bound > beta {
            if splits_left == 0 {
                stats.truncated = true;
            } else {
                splits_left -= 1;
                let (l, r) = ends.split();
                stack.push((r, depth + 1));
                stack.push((l, depth + 1));
                continue;
            }
        }
        stats.leaves += 1;
        // Neumaier accumulation of the certified bound
        let t = bound_acc + bound;
        if bound_acc.abs() >= bound.abs() {
            bound_comp += (bound_acc - t) + bound;
        } else {
            bound_comp += (bound - t) + bound_acc;
        }
        bound_acc = t;
        on_leaf(ends.mediant_f64(), mass, diam);
    }
    stats.bound_sum = bound_acc + bound_comp;
    stats
}

/// Largest per-cell threshold whose front meets `target` within `budget`
/// cells, located by a deterministic geometric descent plus bisection.
///
/// When no threshold fits (the budget is too small for the target), the
/// best in-budget front is returned instead and the caller sorts out which
/// rows it still certifies.
pub(crate) fn choose_beta(half_lip: f64, target: f64, budget: u64) -> f64 {
    let probe = |beta: f64| walk_front(half_lip, beta, budget, |_, _, _| ());
    let feasible = |s: &WalkStats| s.bound_sum <= target && !s.truncated;

    let mut hi = target.min(2.0); // bounds never exceed 2
    let mut stats = probe(hi);
    if feasible(&stats) {
        return hi;
    }
    // geometric descent; bound_sum <= budget * beta forces an exit
    let mut lo = hi;
    let mut lo_feasible = false;
    for _ in 0..40 {
        lo = hi / 8.0;
        stats = probe(lo);
        if feasible(&stats) {
            lo_feasible = true;
            break;
        }
        if stats.truncated {
            break;
        }
        hi = lo;
    }

    if lo_feasible {
        // push beta back up toward hi to keep the front small
        let mut best = lo;
        let mut a = lo;
        let mut b = hi;
        for _ in 0..3 {
            let mid = (a * b).sqrt();
            if feasible(&probe(mid)) {
                best = mid;
                a = mid;
            } else {
                b = mid;
            }
        }
        best
    } else {
        // budget-limited: take the least beta that still fits the budget
        let mut a = lo; // truncated
        let mut b = hi; // not truncated
        for _ in 0..4 {
            let mid = (a * b).sqrt();
            if probe(mid).truncated {
                a = mid;
            } else {
                b = mid;
            }
        }
        b
    }
}
