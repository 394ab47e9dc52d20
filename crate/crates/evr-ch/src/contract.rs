//! Vertex contraction with bicriteria witness searches.

use crate::overlay::{Origin, Overlay, OverlayArc};
use evr_model::{Graph, SocProfile, VertexId};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

/// Preprocessing parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChConfig {
    /// Contraction stops before the core's average out-degree would exceed this.
    pub core_degree: f64,
    /// Maximum number of labels per vertex in a witness search.
    pub label_cap: usize,
    /// Witness paths have at most this many arcs.
    pub hop_limit: u32,
    /// Keep a single shortcut per vertex pair, the one minimizing
    /// `drive + cost / max_rate`. The overlay is then inexact.
    pub aggressive: bool,
}

impl Default for ChConfig {
    fn default() -> Self {
        ChConfig {
            core_degree: 32.0,
            label_cap: 10,
            hop_limit: 20,
            aggressive: false,
        }
    }
}

/// The terms of a vertex's contraction priority `64 ed + dn + cq`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PriorityTerms {
    /// Shortcuts added minus arcs removed.
    pub ed: i64,
    /// Neighbors contracted so far.
    pub dn: i64,
    /// Depth of the search space below the vertex.
    pub cq: i64,
}

impl PriorityTerms {
    pub fn value(&self) -> i64 {
        64 * self.ed + self.dn + self.cq
    }
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    tail: VertexId,
    head: VertexId,
    drive: f64,
    profile: SocProfile,
    first: u32,
    second: u32,
}

#[derive(Clone, Copy)]
struct WLabel {
    vertex: VertexId,
    drive: f64,
    profile: SocProfile,
    hops: u32,
    alive: bool,
}

#[derive(Clone, Copy, PartialEq)]
struct F(f64);

impl Eq for F {}

impl PartialOrd for F {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for F {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

/// Whether label `a` is at least as good as `b`: no slower and never a
/// lower exit SoC.
fn dominates(a: (f64, &SocProfile), b: (f64, &SocProfile), capacity: f64) -> bool {
    a.0 <= b.0 && a.1.dominates(b.1, capacity, 0.0)
}

/// Mutable contraction state over the base graph's vertex ids.
pub struct Contraction<'g> {
    g: &'g Graph,
    cfg: ChConfig,
    capacity: f64,
    arcs: Vec<OverlayArc>,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    contracted: Vec<bool>,
    rank: Vec<u32>,
    dn: Vec<u32>,
    depth: Vec<u32>,
    up_out: Vec<Vec<u32>>,
    down_in: Vec<Vec<u32>>,
    live_arcs: usize,
    live_vertices: usize,
    order: u32,
    labels: Vec<WLabel>,
    at: Vec<Vec<u32>>,
    touched: Vec<VertexId>,
}

impl<'g> Contraction<'g> {
    pub fn new(g: &'g Graph, cfg: ChConfig) -> Self {
        let n = g.num_vertices();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut arcs = Vec::with_capacity(g.num_arcs());
        let mut live_arcs = 0;
        for (id, a) in g.arcs().iter().enumerate() {
            arcs.push(OverlayArc {
                tail: a.tail,
                head: a.head,
                drive: a.drive,
                profile: *g.profile(id as u32),
                origin: Origin::Base(id as u32),
            });
            // Loops never lie on an optimal route.
            if a.tail != a.head && g.profile(id as u32).in_min <= g.capacity() {
                out[a.tail as usize].push(id as u32);
                inn[a.head as usize].push(id as u32);
                live_arcs += 1;
            }
        }
        let mut c = Contraction {
            g,
            cfg,
            capacity: g.capacity(),
            arcs,
            out,
            inn,
            contracted: vec![false; n],
            rank: vec![u32::MAX; n],
            dn: vec![0; n],
            depth: vec![0; n],
            up_out: vec![Vec::new(); n],
            down_in: vec![Vec::new(); n],
            live_arcs,
            live_vertices: n,
            order: 0,
            labels: Vec::new(),
            at: vec![Vec::new(); n],
            touched: Vec::new(),
        };
        for v in 0..n {
            c.sort_adjacency(v as VertexId);
        }
        c
    }

    fn sort_adjacency(&mut self, v: VertexId) {
        let arcs = &self.arcs;
        let key = |&id: &u32| (arcs[id as usize].drive, id);
        self.out[v as usize].sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        self.inn[v as usize].sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    }

    fn omega(&self, drive: f64, p: &SocProfile) -> f64 {
        let r = self.g.max_rate();
        if r > 0.0 {
            drive + p.cost / r
        } else {
            drive
        }
    }

    pub fn is_contractible(&self, v: VertexId) -> bool {
        !self.contracted[v as usize] && !self.g.is_station(v)
    }

    /// Priority terms of contracting `v` now.
    pub fn priority(&mut self, v: VertexId) -> PriorityTerms {
        let cands = self.simulate(v);
        self.terms(v, cands.len())
    }

    fn terms(&self, v: VertexId, shortcuts: usize) -> PriorityTerms {
        let removed = self.out[v as usize].len() + self.inn[v as usize].len();
        PriorityTerms {
            ed: shortcuts as i64 - removed as i64,
            dn: self.dn[v as usize] as i64,
            cq: self.depth[v as usize] as i64,
        }
    }

    /// Shortcuts needed if `v` were contracted now.
    fn simulate(&mut self, v: VertexId) -> Vec<Candidate> {
        let mut result = Vec::new();
        let ins = self.inn[v as usize].clone();
        let outs = self.out[v as usize].clone();
        let mut tails: Vec<VertexId> = ins.iter().map(|&a| self.arcs[a as usize].tail).collect();
        tails.sort_unstable();
        tails.dedup();
        for u in tails {
            let mut cands: Vec<Candidate> = Vec::new();
            for &a in ins.iter().filter(|&&a| self.arcs[a as usize].tail == u) {
                let x = self.arcs[a as usize];
                for &b in &outs {
                    let y = self.arcs[b as usize];
                    if y.head == u {
                        continue;
                    }
                    let profile = x.profile.link(&y.profile);
                    if !(profile.in_min <= self.capacity) {
                        continue;
                    }
                    cands.push(Candidate {
                        tail: u,
                        head: y.head,
                        drive: x.drive + y.drive,
                        profile,
                        first: a,
                        second: b,
                    });
                }
            }
            if cands.is_empty() {
                continue;
            }
            let cands = self.prune_among(cands);
            let mut alive = vec![true; cands.len()];
            self.witness(u, v, &cands, &mut alive);
            let mut kept: Vec<Candidate> = cands
                .into_iter()
                .zip(alive)
                .filter_map(|(c, a)| a.then_some(c))
                .collect();
            if self.cfg.aggressive {
                kept = self.best_per_pair(kept);
            }
            result.extend(kept);
        }
        result
    }

    /// Drops candidates dominated by another candidate of the same pair.
    fn prune_among(&self, mut cands: Vec<Candidate>) -> Vec<Candidate> {
        cands.sort_by(|a, b| {
            (a.head, F(a.drive), F(a.profile.in_min), F(a.profile.cost)).cmp(&(
                b.head,
                F(b.drive),
                F(b.profile.in_min),
                F(b.profile.cost),
            ))
        });
        let mut kept: Vec<Candidate> = Vec::new();
        for c in cands {
            let dominated = kept.iter().any(|k| {
                k.head == c.head
                    && dominates((k.drive, &k.profile), (c.drive, &c.profile), self.capacity)
            });
            if !dominated {
                kept.push(c);
            }
        }
        kept
    }

    fn best_per_pair(&self, cands: Vec<Candidate>) -> Vec<Candidate> {
        let mut best: Vec<Candidate> = Vec::new();
        for c in cands {
            match best.iter_mut().find(|b| b.head == c.head) {
                Some(b) => {
                    if self.omega(c.drive, &c.profile) < self.omega(b.drive, &b.profile) {
                        *b = c;
                    }
                }
                None => best.push(c),
            }
        }
        best
    }

    /// Multi-target witness search from `u` avoiding `skip`. Clears
    /// `alive[i]` for every candidate dominated by a single witness path.
    fn witness(&mut self, u: VertexId, skip: VertexId, cands: &[Candidate], alive: &mut [bool]) {
        let mut limit = cands.iter().map(|c| c.drive).fold(0.0, f64::max);
        let mut remaining = cands.len();
        self.labels.clear();
        let mut heap: BinaryHeap<Reverse<(F, F, u32)>> = BinaryHeap::new();
        self.labels.push(WLabel {
            vertex: u,
            drive: 0.0,
            profile: SocProfile::identity(self.capacity),
            hops: 0,
            alive: true,
        });
        self.at[u as usize].push(0);
        self.touched.push(u);
        heap.push(Reverse((F(0.0), F(0.0), 0)));
        while let Some(Reverse((F(drive), _, id))) = heap.pop() {
            let l = self.labels[id as usize];
            if !l.alive {
                continue;
            }
            if drive > limit {
                break;
            }
            if l.hops >= self.cfg.hop_limit {
                continue;
            }
            for i in 0..self.out[l.vertex as usize].len() {
                let a = self.arcs[self.out[l.vertex as usize][i] as usize];
                if a.head == skip {
                    continue;
                }
                let nd = drive + a.drive;
                if nd > limit {
                    continue;
                }
                let np = l.profile.link(&a.profile);
                if !(np.in_min <= self.capacity) {
                    continue;
                }
                let Some(new) = self.insert_label(a.head, nd, np, l.hops + 1) else {
                    continue;
                };
                for (c, flag) in cands.iter().zip(alive.iter_mut()) {
                    if *flag
                        && c.head == a.head
                        && dominates((nd, &np), (c.drive, &c.profile), self.capacity)
                    {
                        *flag = false;
                        remaining -= 1;
                    }
                }
                if remaining == 0 {
                    self.reset_witness();
                    return;
                }
                limit = cands
                    .iter()
                    .zip(alive.iter())
                    .filter(|(_, &f)| f)
                    .map(|(c, _)| c.drive)
                    .fold(0.0, f64::max);
                heap.push(Reverse((F(nd), F(np.cost), new)));
            }
        }
        self.reset_witness();
    }

    fn reset_witness(&mut self) {
        for &v in &self.touched {
            self.at[v as usize].clear();
        }
        self.touched.clear();
    }

    /// Adds a label unless an existing one dominates it, then enforces the
    /// label cap. Returns the new label's id if it survives.
    fn insert_label(
        &mut self,
        v: VertexId,
        drive: f64,
        profile: SocProfile,
        hops: u32,
    ) -> Option<u32> {
        let cap = self.capacity;
        let list = &mut self.at[v as usize];
        let labels = &mut self.labels;
        if list.iter().any(|&i| {
            let l = &labels[i as usize];
            dominates((l.drive, &l.profile), (drive, &profile), cap)
        }) {
            return None;
        }
        list.retain(|&i| {
            let l = &mut labels[i as usize];
            if dominates((drive, &profile), (l.drive, &l.profile), cap) {
                l.alive = false;
                false
            } else {
                true
            }
        });
        if list.is_empty() {
            self.touched.push(v);
        }
        let id = labels.len() as u32;
        labels.push(WLabel {
            vertex: v,
            drive,
            profile,
            hops,
            alive: true,
        });
        let pos = list.partition_point(|&i| labels[i as usize].drive <= drive);
        list.insert(pos, id);
        if list.len() > self.cfg.label_cap {
            // Evict from the closest pair the label whose other gap is smaller.
            let d = |k: usize| labels[list[k] as usize].drive;
            let mut pair = 0;
            for k in 1..list.len() - 1 {
                if d(k + 1) - d(k) < d(pair + 1) - d(pair) {
                    pair = k;
                }
            }
            let left_gap = if pair == 0 {
                f64::INFINITY
            } else {
                d(pair) - d(pair - 1)
            };
            let right_gap = if pair + 2 < list.len() {
                d(pair + 2) - d(pair + 1)
            } else {
                f64::INFINITY
            };
            let victim = if left_gap < right_gap { pair } else { pair + 1 };
            let vid = list.remove(victim);
            labels[vid as usize].alive = false;
            if vid == id {
                return None;
            }
        }
        Some(id)
    }

    fn contract(&mut self, v: VertexId, cands: Vec<Candidate>) {
        let vi = v as usize;
        self.contracted[vi] = true;
        self.rank[vi] = self.order;
        self.order += 1;
        self.live_vertices -= 1;
        let ins = std::mem::take(&mut self.inn[vi]);
        let outs = std::mem::take(&mut self.out[vi]);
        let mut neighbors = Vec::new();
        for &a in &ins {
            let u = self.arcs[a as usize].tail;
            self.out[u as usize].retain(|&x| x != a);
            neighbors.push(u);
        }
        for &a in &outs {
            let w = self.arcs[a as usize].head;
            self.inn[w as usize].retain(|&x| x != a);
            neighbors.push(w);
        }
        self.live_arcs -= ins.len() + outs.len();
        self.down_in[vi] = ins;
        self.up_out[vi] = outs;
        for c in cands {
            self.add_shortcut(c);
        }
        neighbors.sort_unstable();
        neighbors.dedup();
        for w in neighbors {
            self.dn[w as usize] += 1;
            self.depth[w as usize] = self.depth[w as usize].max(self.depth[vi] + 1);
        }
    }

    fn add_shortcut(&mut self, c: Candidate) {
        let (u, w) = (c.tail as usize, c.head as usize);
        if self.cfg.aggressive {
            let om = self.omega(c.drive, &c.profile);
            let parallel: Vec<u32> = self.out[u]
                .iter()
                .copied()
                .filter(|&a| self.arcs[a as usize].head == c.head)
                .collect();
            if parallel.iter().any(|&a| {
                self.omega(self.arcs[a as usize].drive, &self.arcs[a as usize].profile) <= om
            }) {
                return;
            }
            self.out[u].retain(|a| !parallel.contains(a));
            self.inn[w].retain(|a| !parallel.contains(a));
            self.live_arcs -= parallel.len();
        }
        let id = self.arcs.len() as u32;
        self.arcs.push(OverlayArc {
            tail: c.tail,
            head: c.head,
            drive: c.drive,
            profile: c.profile,
            origin: Origin::Shortcut(c.first, c.second),
        });
        let arcs = &self.arcs;
        let pos = self.out[u].partition_point(|&a| arcs[a as usize].drive <= c.drive);
        self.out[u].insert(pos, id);
        let pos = self.inn[w].partition_point(|&a| arcs[a as usize].drive <= c.drive);
        self.inn[w].insert(pos, id);
        self.live_arcs += 1;
    }

    /// Contracts vertices in priority order until only stations remain or
    /// the next contraction would push the core's average out-degree above
    /// the threshold.
    pub fn run(mut self) -> Overlay {
        let n = self.g.num_vertices();
        let mut heap: BinaryHeap<Reverse<(i64, VertexId)>> = BinaryHeap::new();
        for v in 0..n as VertexId {
            if self.is_contractible(v) {
                let p = self.priority(v).value();
                heap.push(Reverse((p, v)));
            }
        }
        while let Some(Reverse((_, v))) = heap.pop() {
            if self.contracted[v as usize] {
                continue;
            }
            let cands = self.simulate(v);
            let p = self.terms(v, cands.len()).value();
            if let Some(&Reverse((next, _))) = heap.peek() {
                if p > next {
                    heap.push(Reverse((p, v)));
                    continue;
                }
            }
            let removed = self.out[v as usize].len() + self.inn[v as usize].len();
            let arcs_after = self.live_arcs + cands.len() - removed;
            let vertices_after = self.live_vertices - 1;
            if vertices_after > 0
                && arcs_after as f64 > self.cfg.core_degree * vertices_after as f64
            {
                break;
            }
            self.contract(v, cands);
        }
        Overlay::assemble(
            self.g,
            self.cfg,
            self.arcs,
            &self.rank,
            &self.up_out,
            &self.down_in,
            &self.out,
            &self.inn,
        )
    }
}

/// Builds a partial contraction hierarchy of `g`. Stations stay in the core.
pub fn preprocess(g: &Graph, cfg: ChConfig) -> Overlay {
    Contraction::new(g, cfg).run()
}
