//! Core model for electric-vehicle routing with charging stops.
//!
//! Quantities are `f64`: time in seconds, energy in Wh. A state of charge
//! (SoC) lives in `[0, M]` or is `-inf`, which marks an infeasible state.

pub mod charging;
pub mod error;
pub mod graph;
pub mod potential;
pub mod profile;
pub mod socfn;

pub use charging::{ChargingFunction, ChargingKind};
pub use error::ModelError;
pub use graph::{Arc, Graph, Station};
pub use potential::{Potential, ZeroPotential};
pub use profile::SocProfile;

/// Vertex identifier.
pub type VertexId = u32;

/// Absolute tolerance used for equality comparisons of times and energies.
pub const EPS: f64 = 1e-9;

/// Sentinel for "no index".
pub const NONE: u32 = u32::MAX;
