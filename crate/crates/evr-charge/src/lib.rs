//! Queries over a partial contraction hierarchy.
//!
//! A query links the target into the overlay with temporary arcs, builds a
//! potential over the core, and runs the label-setting search from the
//! source on upward, core and temporary arcs. [`Engine`] holds the
//! per-overlay data shared by all queries: lower bounds on parallel core
//! shortcuts and the per-pair shortcut choices of the ω heuristics.

mod bounds;
mod engine;
mod graphs;
mod report;

pub use bounds::{CoreBounds, CoreEntry};
pub use engine::{Engine, EngineError, Mode, PotentialKind, QueryPlan, QueryResult};
pub use graphs::{ComponentZero, ForwardGraph, PotentialGraph};
pub use report::{QueryReport, StopReport};

pub use evr_potential::ConvexBound;

/// Lower bound for traversing two connections in sequence; see
/// [`ConvexBound::link`].
pub fn link_convex_bounds(first: &ConvexBound, second: &ConvexBound) -> ConvexBound {
    first.link(second)
}
