use crate::bounds::{CoreBounds, CoreEntry};
use evr_cfp::{SearchArc, SearchGraph};
use evr_ch::{Overlay, QueryGraph, TargetArcs};
use evr_model::{Potential, VertexId, ZeroPotential};
use evr_potential::{BackwardGraph, InBound};

/// Reverse graph of the potential phase: core arcs plus the temporary arcs
/// into the target. Vertices outside the core have no incoming arcs except
/// the target.
pub struct PotentialGraph<'a> {
    pub overlay: &'a Overlay,
    pub bounds: &'a CoreBounds,
    pub targets: &'a TargetArcs,
}

impl PotentialGraph<'_> {
    fn for_each_temp(&self, v: VertexId, f: &mut dyn FnMut(VertexId, f64, f64)) {
        if v == self.targets.target {
            for a in self.targets.arcs() {
                f(a.tail, a.drive, a.profile.cost);
            }
        }
    }
}

impl BackwardGraph for PotentialGraph<'_> {
    fn num_vertices(&self) -> usize {
        self.overlay.num_vertices()
    }

    fn for_each_in_arc(&self, v: VertexId, f: &mut dyn FnMut(VertexId, f64, f64)) {
        if self.overlay.is_core(v) {
            for &id in self.overlay.core_in(v) {
                let a = self.overlay.arc(id);
                f(a.tail, a.drive, a.profile.cost);
            }
        }
        self.for_each_temp(v, f);
    }

    fn for_each_in_bound(&self, v: VertexId, f: &mut dyn FnMut(VertexId, InBound<'_>)) {
        for (tail, entry) in self.bounds.of(v) {
            let inb = match entry {
                CoreEntry::Point { cons, drive } => InBound::Point {
                    cons: *cons,
                    drive: *drive,
                },
                CoreEntry::Hull(h) => InBound::Hull(h),
            };
            f(*tail, inb);
        }
        self.for_each_temp(v, &mut |u, drive, cons| {
            f(u, InBound::Point { cons, drive })
        });
    }

    fn charge_rate(&self, v: VertexId) -> Option<f64> {
        self.overlay.graph().station_at(v).map(|s| s.cf.max_rate())
    }

    fn max_rate(&self) -> f64 {
        self.overlay.graph().max_rate()
    }
}

/// Forward graph of the search phase, optionally restricted to one
/// precomputed overlay arc per vertex pair. Temporary arcs are always kept.
pub struct ForwardGraph<'a> {
    pub query: QueryGraph<'a>,
    /// Per vertex, the overlay arc ids to scan instead of the full lists.
    pub restrict: Option<&'a [Vec<u32>]>,
}

impl SearchGraph for ForwardGraph<'_> {
    fn num_vertices(&self) -> usize {
        self.query.num_vertices()
    }

    fn out_arcs(&self, v: VertexId, out: &mut Vec<SearchArc>) {
        let Some(lists) = self.restrict else {
            return self.query.out_arcs(v, out);
        };
        let ov = self.query.overlay;
        for &id in &lists[v as usize] {
            let a = ov.arc(id);
            out.push(SearchArc {
                head: a.head,
                drive: a.drive,
                profile: a.profile,
                id,
            });
        }
        let base = ov.arcs().len() as u32;
        let targets = self.query.targets;
        for i in targets.from(v) {
            let a = &targets.arcs()[i as usize];
            out.push(SearchArc {
                head: targets.target,
                drive: a.drive,
                profile: a.profile,
                id: base + i,
            });
        }
    }
}

/// Uses `inner` on core vertices and the zero potential elsewhere.
///
/// Outside the core the search only climbs towards the core or jumps to the
/// target, where the potential is zero as well, so reduced costs stay
/// nonnegative.
pub struct ComponentZero<P> {
    pub inner: P,
    pub core_size: usize,
}

impl<P: Potential> Potential for ComponentZero<P> {
    fn key(&mut self, v: VertexId, f: &[(f64, f64)]) -> f64 {
        if (v as usize) < self.core_size {
            self.inner.key(v, f)
        } else {
            ZeroPotential.key(v, f)
        }
    }

    fn value(&mut self, v: VertexId, soc: f64) -> f64 {
        if (v as usize) < self.core_size {
            self.inner.value(v, soc)
        } else {
            ZeroPotential.value(v, soc)
        }
    }
}
