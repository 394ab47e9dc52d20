use crate::ConvexBound;
use evr_model::{Graph, VertexId};

/// Lower bound carried by an incoming connection during backward searches.
#[derive(Clone, Copy, Debug)]
pub enum InBound<'a> {
    /// A single arc: shift by its consumption and driving time.
    Point { cons: f64, drive: f64 },
    /// A bundle of parallel connections summarized by a convex bound.
    Hull(&'a ConvexBound),
}

/// Reverse adjacency used by the potential searches.
pub trait BackwardGraph {
    fn num_vertices(&self) -> usize;

    /// Calls `f(tail, drive, cons)` for every arc entering `v`.
    fn for_each_in_arc(&self, v: VertexId, f: &mut dyn FnMut(VertexId, f64, f64));

    /// Calls `f(tail, bound)` for every connection entering `v`.
    fn for_each_in_bound(&self, v: VertexId, f: &mut dyn FnMut(VertexId, InBound<'_>)) {
        self.for_each_in_arc(v, &mut |u, drive, cons| {
            f(u, InBound::Point { cons, drive })
        });
    }

    /// Maximum charging rate at `v`, if `v` is a station.
    fn charge_rate(&self, v: VertexId) -> Option<f64>;

    /// Maximum charging rate over all stations, 0 without stations.
    fn max_rate(&self) -> f64;
}

impl BackwardGraph for Graph {
    fn num_vertices(&self) -> usize {
        Graph::num_vertices(self)
    }

    fn for_each_in_arc(&self, v: VertexId, f: &mut dyn FnMut(VertexId, f64, f64)) {
        for &id in self.in_ids(v) {
            let a = self.arc(id);
            f(a.tail, a.drive, a.cons);
        }
    }

    fn charge_rate(&self, v: VertexId) -> Option<f64> {
        self.station_at(v).map(|s| s.cf.max_rate())
    }

    fn max_rate(&self) -> f64 {
        Graph::max_rate(self)
    }
}
