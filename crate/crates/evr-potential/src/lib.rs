//! Lower bounds on the remaining trip time used as A* potentials.
//!
//! [`OmegaTables`] combines three scalar backward searches. [`PiSearch`]
//! propagates convex piecewise-linear bounds over SoC and can run lazily,
//! answering requests from a suspended state.

mod backward;
mod bound;
mod omega;
mod pi;

pub use backward::{BackwardGraph, InBound};
pub use bound::ConvexBound;
pub use omega::OmegaTables;
pub use pi::{PiSearch, PiStats, Suspension};

use evr_model::socfn;

/// `min_t t + F(f(t))` for a bound `F` and a label's SoC function `f`.
///
/// Both are piecewise linear, so the minimum lies at a breakpoint of `f` or
/// where `f` first reaches the SoC of a breakpoint of `F`.
pub fn bound_key(bound: &ConvexBound, f: &[(f64, f64)]) -> f64 {
    if bound.is_empty() {
        return f64::INFINITY;
    }
    let mut best = f64::INFINITY;
    for &(t, y) in f {
        best = best.min(t + bound.eval(y));
    }
    for &(b, _) in bound.points() {
        if let Some(t) = socfn::first_time_reaching(f, b) {
            best = best.min(t + bound.eval(b));
        }
    }
    best
}
