//! Partial contraction hierarchy for EV routing.
//!
//! [`preprocess`] contracts non-station vertices until the core reaches a
//! target density. Shortcuts carry a driving time and a SoC profile, and
//! parallel shortcuts are kept when neither dominates the other. At query
//! time [`TargetArcs`] links the target to the upward search space and
//! [`QueryGraph`] is the forward search graph.

mod contract;
mod format;
mod overlay;
mod query;

pub use contract::{preprocess, ChConfig, Contraction, PriorityTerms};
pub use format::{FormatError, MAGIC, VERSION};
pub use overlay::{Csr, Origin, Overlay, OverlayArc, CORE_RANK};
pub use query::{QueryGraph, TargetArc, TargetArcs};
