//! Interface between the label-setting search and A* potentials.

use crate::VertexId;

/// Supplies consistent keys for labels.
///
/// Given the SoC function `f` of a label at vertex `v`, the key is a lower
/// bound on the arrival time at the target: `min_t t + pot(v, f(t))`.
/// Returning `+inf` prunes the label.
pub trait Potential {
    fn key(&mut self, v: VertexId, f: &[(f64, f64)]) -> f64;

    /// Evaluates the potential at a single SoC value.
    fn value(&mut self, v: VertexId, soc: f64) -> f64;
}

/// The zero potential: keys are minimum feasible trip times.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroPotential;

impl Potential for ZeroPotential {
    fn key(&mut self, _v: VertexId, f: &[(f64, f64)]) -> f64 {
        f.first().map_or(f64::INFINITY, |p| p.0)
    }

    fn value(&mut self, _v: VertexId, soc: f64) -> f64 {
        if soc.is_finite() {
            0.0
        } else {
            f64::INFINITY
        }
    }
}
