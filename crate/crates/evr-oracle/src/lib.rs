//! Reference solvers for checking the label-setting search on small
//! instances.
//!
//! [`grid_dp_query`] restricts charging decisions to a SoC grid and solves
//! the restricted problem exhaustively. Its result is never below the true
//! optimum and never increases when the grid is refined to a nested one.
//! [`bsp_reference`] solves the station-free problem with nonnegative
//! consumption as a plain resource-constrained shortest path.

mod bsp;
mod corpus;
mod dp;
mod validate;

pub use bsp::{bsp_reference, BspError};
pub use corpus::{random_instance, CorpusParams};
pub use dp::{grid_dp_query, DpError, DpResult, DEFAULT_STATE_CAP};
pub use validate::{
    minimize_counterexample, tolerance, validate_instance, QueryCheck, ValidateError,
    ValidationReport, Violation, ViolationKind, SCHEMA,
};
