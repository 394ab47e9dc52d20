use thiserror::Error;

/// Validation failures raised while constructing model objects.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("battery capacity must be positive and finite, got {0}")]
    BadCapacity(f64),
    #[error("arc {index} ({tail}->{head}): {reason}")]
    BadArc {
        index: usize,
        tail: u32,
        head: u32,
        reason: String,
    },
    #[error("station at vertex {vertex}: {reason}")]
    BadStation { vertex: u32, reason: String },
    #[error("charging curve: {0}")]
    BadCurve(String),
    #[error("target SoC {to} exceeds the maximum reachable SoC {max}")]
    UnreachableSoc { to: f64, max: f64 },
    #[error("arrival SoC {soc} exceeds the maximum reachable SoC {max}")]
    SocAboveMax { soc: f64, max: f64 },
    #[error("graph contains a cycle of negative total consumption through vertex {0}")]
    NegativeCycle(u32),
}
