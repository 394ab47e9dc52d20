//! Query-side use of the overlay: temporary arcs into the target, the
//! forward search graph, and translation of routes back to base arcs.

use crate::overlay::Overlay;
use evr_cfp::{Event, Itinerary, RawRoute, SearchArc, SearchGraph, Stop};
use evr_model::{SocProfile, VertexId, NONE};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// A temporary arc from a vertex to the query target, standing for a
/// downward path through the contracted part of the graph.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetArc {
    pub tail: VertexId,
    pub drive: f64,
    pub profile: SocProfile,
    /// Overlay arcs from `tail` to the target.
    pub chain: Vec<u32>,
}

#[derive(Clone, Copy)]
struct BLabel {
    vertex: VertexId,
    drive: f64,
    profile: SocProfile,
    /// Preceding label towards the target and the arc leading to it.
    next: u32,
    arc: u32,
    alive: bool,
}

#[derive(Clone, Copy)]
struct Key(f64, f64);

impl PartialEq for Key {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o).is_eq()
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Key {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0).then(self.1.total_cmp(&o.1))
    }
}

/// Temporary arcs into `t` for one query, grouped by tail.
#[derive(Clone, Debug, Default)]
pub struct TargetArcs {
    pub target: VertexId,
    /// Sorted by tail.
    arcs: Vec<TargetArc>,
    pub labels_settled: u64,
}

impl TargetArcs {
    /// Backward search from `t` over downward arcs, not expanding core
    /// vertices. Every nondominated label at a vertex other than `t`
    /// becomes a temporary arc.
    pub fn build(ov: &Overlay, t: VertexId) -> TargetArcs {
        let cap = ov.graph().capacity();
        let n = ov.num_vertices();
        let mut labels: Vec<BLabel> = vec![BLabel {
            vertex: t,
            drive: 0.0,
            profile: SocProfile::identity(cap),
            next: NONE,
            arc: NONE,
            alive: true,
        }];
        let mut at: Vec<Vec<u32>> = vec![Vec::new(); n];
        at[t as usize].push(0);
        let mut heap = BinaryHeap::new();
        let mut settled = 0;
        if !ov.is_core(t) {
            heap.push(Reverse((Key(0.0, 0.0), 0u32)));
        }
        while let Some(Reverse((_, id))) = heap.pop() {
            let l = labels[id as usize];
            if !l.alive {
                continue;
            }
            settled += 1;
            for &a in ov.down_in(l.vertex) {
                let arc = ov.arc(a);
                let profile = arc.profile.link(&l.profile);
                if !(profile.in_min <= cap) {
                    continue;
                }
                let drive = arc.drive + l.drive;
                let u = arc.tail as usize;
                if at[u]
                    .iter()
                    .any(|&i| dominates(&labels[i as usize], drive, &profile, cap))
                {
                    continue;
                }
                at[u].retain(|&i| {
                    let o = &mut labels[i as usize];
                    if o.drive >= drive && profile.dominates(&o.profile, cap, 0.0) {
                        o.alive = false;
                        false
                    } else {
                        true
                    }
                });
                let new = labels.len() as u32;
                labels.push(BLabel {
                    vertex: arc.tail,
                    drive,
                    profile,
                    next: id,
                    arc: a,
                    alive: true,
                });
                at[u].push(new);
                if !ov.is_core(arc.tail) {
                    heap.push(Reverse((Key(drive, profile.in_min), new)));
                }
            }
        }
        let mut arcs = Vec::new();
        for l in labels.iter().filter(|l| l.alive && l.vertex != t) {
            let mut chain = Vec::new();
            let mut cur = l;
            while cur.next != NONE {
                chain.push(cur.arc);
                cur = &labels[cur.next as usize];
            }
            arcs.push(TargetArc {
                tail: l.vertex,
                drive: l.drive,
                profile: l.profile,
                chain,
            });
        }
        arcs.sort_by(|a, b| (a.tail, a.drive).partial_cmp(&(b.tail, b.drive)).unwrap());
        TargetArcs {
            target: t,
            arcs,
            labels_settled: settled,
        }
    }

    pub fn arcs(&self) -> &[TargetArc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Indices of the temporary arcs leaving `v`.
    pub fn from(&self, v: VertexId) -> std::ops::Range<u32> {
        let lo = self.arcs.partition_point(|a| a.tail < v);
        let hi = self.arcs.partition_point(|a| a.tail <= v);
        lo as u32..hi as u32
    }
}

fn dominates(l: &BLabel, drive: f64, profile: &SocProfile, cap: f64) -> bool {
    l.drive <= drive && l.profile.dominates(profile, cap, 0.0)
}

/// Forward graph of one query: upward and core arcs plus the temporary arcs
/// into the target. Temporary arc `i` has search id `num_arcs + i`.
pub struct QueryGraph<'a> {
    pub overlay: &'a Overlay,
    pub targets: &'a TargetArcs,
}

impl QueryGraph<'_> {
    fn temp_base(&self) -> u32 {
        self.overlay.arcs().len() as u32
    }

    /// Base arcs (internal ids) behind a search arc id.
    pub fn unpack(&self, id: u32, out: &mut Vec<u32>) {
        let base = self.temp_base();
        if id < base {
            self.overlay.unpack(id, out);
        } else {
            for &a in &self.targets.arcs[(id - base) as usize].chain {
                self.overlay.unpack(a, out);
            }
        }
    }

    /// Rewrites a route found on this graph into base-arc events on the
    /// internal graph.
    pub fn expand(&self, route: &RawRoute) -> RawRoute {
        let g = self.overlay.graph();
        let mut events = Vec::with_capacity(route.events.len());
        let mut ids = Vec::new();
        for ev in &route.events {
            match ev {
                &Event::Arc { id, .. } => {
                    ids.clear();
                    self.unpack(id, &mut ids);
                    for &b in &ids {
                        let a = g.arc(b);
                        events.push(Event::Arc {
                            id: b,
                            tail: a.tail,
                            head: a.head,
                            drive: a.drive,
                        });
                    }
                }
                stop => events.push(*stop),
            }
        }
        RawRoute {
            trip_time: route.trip_time,
            events,
        }
    }
}

impl SearchGraph for QueryGraph<'_> {
    fn num_vertices(&self) -> usize {
        self.overlay.num_vertices()
    }

    fn out_arcs(&self, v: VertexId, out: &mut Vec<SearchArc>) {
        self.overlay.out_arcs(v, out);
        let base = self.temp_base();
        for i in self.targets.from(v) {
            let a = &self.targets.arcs[i as usize];
            out.push(SearchArc {
                head: self.targets.target,
                drive: a.drive,
                profile: a.profile,
                id: base + i,
            });
        }
    }
}

impl Overlay {
    /// Builds an itinerary in original ids from a route over internal base
    /// arcs starting at internal vertex `source`.
    pub fn original_itinerary(&self, source: VertexId, route: &RawRoute) -> Itinerary {
        let it = Itinerary::from_route(self.graph(), source, route);
        Itinerary {
            trip_time: it.trip_time,
            drive_time: it.drive_time,
            charge_time: it.charge_time,
            path: it.path.iter().map(|&v| self.to_original(v)).collect(),
            arcs: it.arcs.iter().map(|&a| self.arc_to_original(a)).collect(),
            stops: it
                .stops
                .iter()
                .map(|s| Stop {
                    vertex: self.to_original(s.vertex),
                    ..*s
                })
                .collect(),
        }
    }
}
