use crate::{bound_key, BackwardGraph, ConvexBound, InBound};
use evr_model::{Potential, VertexId};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// When an on-demand search suspends after reaching a vertex whose bound
/// starts at time `t1`: once the queue minimum exceeds
/// `min(factor * t1, t1 + additive)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Suspension {
    pub factor: f64,
    pub additive: f64,
}

impl Default for Suspension {
    fn default() -> Self {
        Suspension {
            factor: 2.0,
            additive: 3600.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PiStats {
    pub scans: u64,
    pub merges: u64,
    /// Largest observed decrease of the queue minimum between scans.
    pub max_key_drop: f64,
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

/// Function-propagating backward search computing, per vertex, a convex
/// lower bound on the remaining trip time as a function of SoC.
///
/// Each vertex holds one bound. A vertex is queued with the smallest time
/// among breakpoints its bound gained since it was last scanned, which keeps
/// the queue minimum nondecreasing. Bounds at stations are extended with the
/// station's maximum rate whenever they change.
pub struct PiSearch<'g, G: BackwardGraph + ?Sized> {
    g: &'g G,
    target: VertexId,
    bounds: Vec<ConvexBound>,
    queued_key: Vec<f64>,
    reached: Vec<bool>,
    heap: BinaryHeap<Reverse<(Key, VertexId)>>,
    suspension: Option<Suspension>,
    /// Largest SoC gain per second of driving or charging anywhere in the graph.
    gain_rate: f64,
    last_min: f64,
    stats: PiStats,
}

impl<'g, G: BackwardGraph + ?Sized> PiSearch<'g, G> {
    /// Starts a search towards `t`. With `suspension` the search only runs
    /// as far as potential requests need; otherwise it runs to completion.
    pub fn new(g: &'g G, t: VertexId, suspension: Option<Suspension>) -> Self {
        let n = g.num_vertices();
        let mut gain_rate = g.max_rate();
        for v in 0..n as VertexId {
            g.for_each_in_arc(v, &mut |_, drive, cons| {
                if cons < 0.0 {
                    gain_rate = gain_rate.max(-cons / drive);
                }
            });
        }
        let mut s = PiSearch {
            g,
            target: t,
            bounds: vec![ConvexBound::empty(); n],
            queued_key: vec![f64::INFINITY; n],
            reached: vec![false; n],
            heap: BinaryHeap::new(),
            suspension,
            gain_rate,
            last_min: f64::NEG_INFINITY,
            stats: PiStats::default(),
        };
        let mut seed = ConvexBound::point(0.0, 0.0);
        if let Some(rate) = g.charge_rate(t) {
            seed = seed.extend(rate);
        }
        s.bounds[t as usize] = seed;
        s.queued_key[t as usize] = 0.0;
        s.heap.push(Reverse((Key(0.0), t)));
        if suspension.is_none() {
            s.run_to_completion();
        }
        s
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn stats(&self) -> PiStats {
        self.stats
    }

    /// Current bound of `v`, without the suspension correction.
    pub fn bound(&self, v: VertexId) -> &ConvexBound {
        &self.bounds[v as usize]
    }

    /// Whether `v` has been scanned at least once.
    pub fn is_reached(&self, v: VertexId) -> bool {
        self.reached[v as usize]
    }

    /// Smallest key in the queue, infinite once the search has drained.
    pub fn queue_min(&mut self) -> f64 {
        while let Some(&Reverse((Key(k), v))) = self.heap.peek() {
            if self.queued_key[v as usize] == k {
                return k;
            }
            self.heap.pop();
        }
        f64::INFINITY
    }

    pub fn is_drained(&mut self) -> bool {
        self.queue_min() == f64::INFINITY
    }

    pub fn run_to_completion(&mut self) {
        while self.step().is_some() {}
    }

    /// Scans one vertex; returns it with its key, or `None` when drained.
    pub fn step(&mut self) -> Option<(VertexId, f64)> {
        let k = self.queue_min();
        if k == f64::INFINITY {
            return None;
        }
        let Reverse((_, v)) = self.heap.pop().expect("queue_min saw an entry");
        if k < self.last_min {
            self.stats.max_key_drop = self.stats.max_key_drop.max(self.last_min - k);
        }
        self.last_min = self.last_min.max(k);
        self.queued_key[v as usize] = f64::INFINITY;
        self.reached[v as usize] = true;
        self.stats.scans += 1;
        let fv = std::mem::take(&mut self.bounds[v as usize]);
        let g = self.g;
        g.for_each_in_bound(v, &mut |u, inb| {
            let cand = match inb {
                InBound::Point { cons, drive } => fv.shift(cons, drive),
                InBound::Hull(h) => h.link(&fv),
            };
            self.relax(u, cand);
        });
        if self.bounds[v as usize].is_empty() {
            self.bounds[v as usize] = fv;
        } else {
            // A self-loop wrote into the slot while it was taken.
            let merged = fv.merge(&self.bounds[v as usize]);
            self.bounds[v as usize] = merged;
        }
        Some((v, k))
    }

    fn relax(&mut self, u: VertexId, cand: ConvexBound) {
        let old = &self.bounds[u as usize];
        if !old.is_improved_by(&cand) {
            return;
        }
        let mut merged = old.merge(&cand);
        if let Some(rate) = self.g.charge_rate(u) {
            merged = merged.extend(rate);
        }
        // Improvements confined to SoC values the extension cuts off vanish here.
        let Some(key) = merged.min_new_time(old) else {
            return;
        };
        self.stats.merges += 1;
        self.bounds[u as usize] = merged;
        let slot = &mut self.queued_key[u as usize];
        if key < *slot {
            *slot = key;
            self.heap.push(Reverse((Key(key), u)));
        }
    }

    /// Resumes a suspended search until `v` is reached and the queue minimum
    /// has moved past the suspension threshold of `v`.
    pub fn ensure(&mut self, v: VertexId) {
        let Some(sus) = self.suspension else {
            return;
        };
        while !self.reached[v as usize] {
            if self.step().is_none() {
                return;
            }
        }
        loop {
            let t1 = self.bounds[v as usize].first_time();
            let limit = (sus.factor * t1).min(t1 + sus.additive);
            if self.queue_min() > limit || self.step().is_none() {
                return;
            }
        }
    }

    /// Bound of `v` corrected for the unexplored part of the graph. Does not
    /// resume the search.
    ///
    /// Caps the bound at the queue minimum `t*` from SoC 0 on and limits its
    /// slope to `-1 / gain_rate`, the fastest SoC can rise by charging or
    /// recuperation. Without the slope limit a recuperating arc can carry a
    /// vertex from the capped region onto a steep segment of its head and the
    /// reduced cost turns negative.
    pub fn effective_bound(&mut self, v: VertexId) -> ConvexBound {
        let t_star = self.queue_min();
        let b = &self.bounds[v as usize];
        if t_star.is_infinite() {
            return b.clone();
        }
        b.merge(&ConvexBound::point(0.0, t_star))
            .extend(self.gain_rate)
    }

    /// The bound merged with the single breakpoint `(0, t*)`. A lower bound
    /// on trip times, but negative-consumption arcs can give it negative
    /// reduced costs.
    pub fn point_corrected_bound(&mut self, v: VertexId) -> ConvexBound {
        let t_star = self.queue_min();
        let b = &self.bounds[v as usize];
        if t_star.is_infinite() {
            b.clone()
        } else {
            b.merge(&ConvexBound::point(0.0, t_star))
        }
    }
}

impl<G: BackwardGraph + ?Sized> Potential for PiSearch<'_, G> {
    fn key(&mut self, v: VertexId, f: &[(f64, f64)]) -> f64 {
        if self.suspension.is_none() {
            return bound_key(&self.bounds[v as usize], f);
        }
        self.ensure(v);
        let b = self.effective_bound(v);
        bound_key(&b, f)
    }

    fn value(&mut self, v: VertexId, soc: f64) -> f64 {
        if self.suspension.is_none() {
            return self.bounds[v as usize].eval(soc);
        }
        self.ensure(v);
        self.effective_bound(v).eval(soc)
    }
}
