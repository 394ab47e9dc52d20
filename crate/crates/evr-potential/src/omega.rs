use crate::BackwardGraph;
use evr_model::{Potential, VertexId};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

/// Backward distances to one target under driving time, consumption, and
/// the combined cost `drive + cons / rate`, where `rate` is the largest
/// charging rate in the graph.
#[derive(Clone, Debug)]
pub struct OmegaTables {
    target: VertexId,
    rate: f64,
    d_time: Vec<f64>,
    d_cons: Vec<f64>,
    d_omega: Vec<f64>,
}

#[derive(Clone, Copy)]
struct Key(f64);

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
        self.0.total_cmp(&o.0)
    }
}

fn dijkstra<G: BackwardGraph + ?Sized>(g: &G, t: VertexId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.num_vertices()];
    let mut heap = BinaryHeap::new();
    dist[t as usize] = 0.0;
    heap.push(Reverse((Key(0.0), t)));
    while let Some(Reverse((Key(d), v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        g.for_each_in_arc(v, &mut |u, drive, _| {
            let nd = d + drive;
            if nd < dist[u as usize] {
                dist[u as usize] = nd;
                heap.push(Reverse((Key(nd), u)));
            }
        });
    }
    dist
}

/// Label-correcting search with a FIFO queue; labels above `limit` are dropped.
fn label_correcting<G: BackwardGraph + ?Sized>(
    g: &G,
    t: VertexId,
    cost: impl Fn(f64, f64) -> f64,
    limit: f64,
) -> Vec<f64> {
    let n = g.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut queued = vec![false; n];
    let mut queue = VecDeque::from([t]);
    dist[t as usize] = 0.0;
    queued[t as usize] = true;
    while let Some(v) = queue.pop_front() {
        queued[v as usize] = false;
        let d = dist[v as usize];
        g.for_each_in_arc(v, &mut |u, drive, cons| {
            let nd = d + cost(drive, cons);
            let tol = 1e-12 * nd.abs().max(1.0);
            if nd <= limit && nd < dist[u as usize] - tol {
                dist[u as usize] = nd;
                if !queued[u as usize] {
                    queued[u as usize] = true;
                    queue.push_back(u);
                }
            }
        });
    }
    dist
}

impl OmegaTables {
    /// Runs the three backward searches from `t`. Consumption values above
    /// `capacity` are treated as unreachable.
    pub fn compute<G: BackwardGraph + ?Sized>(g: &G, t: VertexId, capacity: f64) -> Self {
        let rate = g.max_rate();
        let d_time = dijkstra(g, t);
        let d_cons = label_correcting(g, t, |_, c| c, capacity);
        let d_omega = if rate > 0.0 {
            label_correcting(g, t, |d, c| d + c / rate, f64::INFINITY)
        } else {
            let mut v = vec![f64::INFINITY; g.num_vertices()];
            v[t as usize] = 0.0;
            v
        };
        OmegaTables {
            target: t,
            rate,
            d_time,
            d_cons,
            d_omega,
        }
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn d_time(&self, v: VertexId) -> f64 {
        self.d_time[v as usize]
    }

    pub fn d_cons(&self, v: VertexId) -> f64 {
        self.d_cons[v as usize]
    }

    pub fn d_omega(&self, v: VertexId) -> f64 {
        self.d_omega[v as usize]
    }

    /// Lower bound on the remaining trip time from `v` with SoC `soc`:
    /// `max(d_time, d_omega - soc / rate)`.
    ///
    /// Any route needs its driving time plus the time to charge whatever its
    /// consumption exceeds `soc`, so both terms are lower bounds. Unlike the
    /// case split in [`OmegaTables::piecewise`], the maximum is continuous in
    /// `soc`, which keeps `t + pot(v, charge(s, t))` nondecreasing at stations.
    pub fn potential(&self, v: VertexId, soc: f64) -> f64 {
        let i = v as usize;
        if soc == f64::NEG_INFINITY || self.d_time[i].is_infinite() {
            return f64::INFINITY;
        }
        if self.rate > 0.0 {
            self.d_time[i].max(self.d_omega[i] - soc / self.rate)
        } else if soc >= self.d_cons[i] {
            self.d_time[i]
        } else {
            f64::INFINITY
        }
    }

    /// `d_time` when `soc` covers the minimum consumption, otherwise
    /// `d_omega - soc / rate`. Consistent on arcs, but it drops by
    /// `d_omega - d_time - d_cons / rate` when charging crosses `d_cons`.
    pub fn piecewise(&self, v: VertexId, soc: f64) -> f64 {
        let i = v as usize;
        if soc == f64::NEG_INFINITY || self.d_time[i].is_infinite() {
            return f64::INFINITY;
        }
        if soc >= self.d_cons[i] {
            self.d_time[i]
        } else if self.rate > 0.0 {
            self.d_omega[i] - soc / self.rate
        } else {
            f64::INFINITY
        }
    }
}

impl Potential for OmegaTables {
    /// Both terms of the potential plus the trip time are nondecreasing along
    /// a SoC function (it rises no faster than `rate`), so the minimum over
    /// trip times sits at the first feasible one.
    fn key(&mut self, v: VertexId, f: &[(f64, f64)]) -> f64 {
        f.first()
            .map_or(f64::INFINITY, |&(t, y)| t + self.potential(v, y))
    }

    fn value(&mut self, v: VertexId, soc: f64) -> f64 {
        self.potential(v, soc)
    }
}
