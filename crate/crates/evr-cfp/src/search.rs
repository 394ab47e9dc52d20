use evr_model::socfn::{self, breakpoints};
use evr_model::{ChargingFunction, Graph, Potential, SocProfile, VertexId, EPS, NONE};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

/// An arc as seen by the search: a base arc, a shortcut, or a temporary arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchArc {
    pub head: VertexId,
    pub drive: f64,
    pub profile: SocProfile,
    /// Identifier interpreted by the graph's owner when unpacking routes.
    pub id: u32,
}

/// Adjacency the search runs on. Vertex ids and stations are those of the
/// underlying [`Graph`].
pub trait SearchGraph {
    fn num_vertices(&self) -> usize;
    /// Appends the arcs leaving `v` to `out` in a deterministic order.
    fn out_arcs(&self, v: VertexId, out: &mut Vec<SearchArc>);
}

impl SearchGraph for Graph {
    fn num_vertices(&self) -> usize {
        Graph::num_vertices(self)
    }

    fn out_arcs(&self, v: VertexId, out: &mut Vec<SearchArc>) {
        for id in self.out_ids(v) {
            let a = self.arc(id);
            out.push(SearchArc {
                head: a.head,
                drive: a.drive,
                profile: *self.profile(id),
                id,
            });
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Config {
    /// Keep at most one new label per head vertex in each vertex scan, the
    /// one of minimum key (ties go to the earlier arc).
    pub one_label_per_head: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Stats {
    pub labels_settled: u64,
    pub dominance_checks: u64,
    pub labels_created: u64,
    /// Largest decrease between consecutive settled keys. Zero up to rounding
    /// for consistent potentials; keys stay lower bounds either way.
    pub max_key_drop: f64,
}

/// One step of a route as reconstructed from the label chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Event {
    Arc {
        id: u32,
        tail: VertexId,
        head: VertexId,
        drive: f64,
    },
    Stop {
        vertex: VertexId,
        arrival_soc: f64,
        depart_soc: f64,
        /// Charging duration, excluding the station's init time.
        duration: f64,
        init_time: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawRoute {
    pub trip_time: f64,
    pub events: Vec<Event>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub route: Option<RawRoute>,
    pub stats: Stats,
    /// Key of the initial label: a lower bound on the optimal trip time.
    pub source_key: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("initial SoC {0} outside [0, capacity]")]
    SocOutOfRange(f64),
    #[error("predecessor chain is broken at label {0}")]
    BrokenChain(u32),
}

const DUMMY: u32 = NONE;
const ROOT: u32 = NONE;
const SPAWN: u32 = NONE - 1;

#[derive(Clone, Copy, Debug)]
struct Label {
    tau: f64,
    soc: f64,
    station: u32,
    profile: SocProfile,
    vertex: VertexId,
    parent: u32,
    via: u32,
    key: f64,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    key: f64,
    tie: f64,
    vertex: VertexId,
    label: u32,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Entry {
    /// Max-heap order: smaller key, then larger SoC, then smaller vertex first.
    fn cmp(&self, o: &Self) -> Ordering {
        o.key
            .total_cmp(&self.key)
            .then(self.tie.total_cmp(&o.tie))
            .then(o.vertex.cmp(&self.vertex))
            .then(o.label.cmp(&self.label))
    }
}

/// Charging durations at the label's station worth switching at: the trip
/// times of the SoC function's breakpoints minus `tau`.
pub fn switching_candidates(
    tau: f64,
    soc: f64,
    cf: &ChargingFunction,
    profile: &SocProfile,
) -> Vec<f64> {
    let mut f = Vec::new();
    breakpoints(tau, soc, cf, profile, &mut f);
    let mut out: Vec<f64> = f.iter().map(|p| (p.0 - tau).max(0.0)).collect();
    out.dedup_by(|a, b| (*a - *b).abs() <= EPS);
    out
}

struct Search<'a, G: SearchGraph, P: Potential> {
    g: &'a Graph,
    sg: &'a G,
    pot: &'a mut P,
    cfg: Config,
    dummy: ChargingFunction,
    target: VertexId,
    labels: Vec<Label>,
    unsettled: Vec<BinaryHeap<Entry>>,
    settled: Vec<Vec<u32>>,
    settled_fn: Vec<(u32, u32)>,
    /// Per settled label at each vertex: first trip time and final SoC, the
    /// cheap necessary conditions of dominance.
    settled_ends: Vec<Vec<(f64, f64)>>,
    flat: Vec<(f64, f64)>,
    queue: BinaryHeap<Entry>,
    stats: Stats,
    scratch: Vec<(f64, f64)>,
    arcs: Vec<SearchArc>,
    pending: Vec<(Label, f64, f64)>,
    last_key: f64,
}

/// Computes a route of minimum trip time from `s` to `t` with initial SoC
/// `soc`, or `None` when no feasible route exists.
pub fn cfp_query<G: SearchGraph, P: Potential>(
    g: &Graph,
    sg: &G,
    pot: &mut P,
    s: VertexId,
    t: VertexId,
    soc: f64,
    cfg: Config,
) -> Result<Outcome, SearchError> {
    let n = g.num_vertices();
    for v in [s, t] {
        if v as usize >= n || v as usize >= sg.num_vertices() {
            return Err(SearchError::VertexOutOfRange(v));
        }
    }
    if !(0.0..=g.capacity()).contains(&soc) {
        return Err(SearchError::SocOutOfRange(soc));
    }
    let mut search = Search {
        g,
        sg,
        pot,
        cfg,
        dummy: ChargingFunction::constant(soc),
        target: t,
        labels: Vec::new(),
        unsettled: vec![BinaryHeap::new(); n],
        settled: vec![Vec::new(); n],
        settled_fn: Vec::new(),
        settled_ends: vec![Vec::new(); n],
        flat: Vec::new(),
        queue: BinaryHeap::new(),
        stats: Stats::default(),
        scratch: Vec::new(),
        arcs: Vec::new(),
        pending: Vec::new(),
        last_key: f64::NEG_INFINITY,
    };
    let root = Label {
        tau: 0.0,
        soc,
        station: DUMMY,
        profile: SocProfile::identity(g.capacity()),
        vertex: s,
        parent: NONE,
        via: ROOT,
        key: 0.0,
    };
    let source_key = search.push(root);
    let found = search.run();
    let route = match found {
        Some(idx) => Some(search.retrieve(idx)?),
        None => None,
    };
    Ok(Outcome {
        route,
        stats: search.stats,
        source_key,
    })
}

impl<'a, G: SearchGraph, P: Potential> Search<'a, G, P> {
    fn cf(&self, station: u32) -> &ChargingFunction {
        if station == DUMMY {
            &self.dummy
        } else {
            &self.g.stations()[station as usize].cf
        }
    }

    fn function_of(&self, l: &Label, out: &mut Vec<(f64, f64)>) {
        breakpoints(l.tau, l.soc, self.cf(l.station), &l.profile, out);
    }

    /// Keys the label and, if finite, inserts it. Returns the key.
    fn push(&mut self, mut l: Label) -> f64 {
        let mut f = std::mem::take(&mut self.scratch);
        self.function_of(&l, &mut f);
        let key = if f.is_empty() {
            f64::INFINITY
        } else {
            self.pot.key(l.vertex, &f)
        };
        if key.is_finite() {
            l.key = key;
            self.insert(l, f[0].1);
        }
        self.scratch = f;
        key
    }

    fn insert(&mut self, l: Label, tie: f64) {
        let idx = self.labels.len() as u32;
        self.labels.push(l);
        self.stats.labels_created += 1;
        let e = Entry {
            key: l.key,
            tie,
            vertex: l.vertex,
            label: idx,
        };
        let heap = &mut self.unsettled[l.vertex as usize];
        let becomes_min = heap.peek().is_none_or(|top| e > *top);
        heap.push(e);
        if becomes_min {
            self.queue.push(e);
        }
    }

    fn requeue(&mut self, v: VertexId) {
        if let Some(&top) = self.unsettled[v as usize].peek() {
            self.queue.push(top);
        }
    }

    fn run(&mut self) -> Option<u32> {
        let mut f = Vec::new();
        while let Some(e) = self.queue.pop() {
            let v = e.vertex;
            match self.unsettled[v as usize].peek() {
                Some(top) if top.label == e.label => {}
                _ => continue,
            }
            self.unsettled[v as usize].pop();
            let l = self.labels[e.label as usize];
            self.function_of(&l, &mut f);
            if self.is_dominated(v, &f) {
                self.requeue(v);
                continue;
            }
            if e.key < self.last_key {
                self.stats.max_key_drop = self.stats.max_key_drop.max(self.last_key - e.key);
            }
            self.last_key = self.last_key.max(e.key);
            let start = self.flat.len() as u32;
            self.flat.extend_from_slice(&f);
            self.settled_fn.resize(self.labels.len(), (0, 0));
            self.settled_fn[e.label as usize] = (start, self.flat.len() as u32);
            self.settled[v as usize].push(e.label);
            self.settled_ends[v as usize].push((f[0].0, f[f.len() - 1].1));
            self.stats.labels_settled += 1;
            if v == self.target {
                return Some(e.label);
            }
            self.spawn(e.label, &l, &f);
            self.scan(e.label, &l);
            self.requeue(v);
        }
        None
    }

    fn is_dominated(&mut self, v: VertexId, f: &[(f64, f64)]) -> bool {
        let (first, last) = (f[0].0, f[f.len() - 1].1);
        let ends = &self.settled_ends[v as usize];
        for (k, &idx) in self.settled[v as usize].iter().enumerate() {
            self.stats.dominance_checks += 1;
            let (t0, y1) = ends[k];
            if t0 > first + EPS || y1 < last - EPS {
                continue;
            }
            let (a, b) = self.settled_fn[idx as usize];
            if socfn::dominates(&self.flat[a as usize..b as usize], f, EPS) {
                return true;
            }
        }
        false
    }

    fn spawn(&mut self, idx: u32, l: &Label, f: &[(f64, f64)]) {
        let Some(station) = self.g.station_index(l.vertex) else {
            return;
        };
        if station == l.station {
            return;
        }
        let cf = &self.g.stations()[station as usize].cf;
        let (amax, init) = (cf.alpha_max(), cf.init_time());
        let identity = SocProfile::identity(self.g.capacity());
        for &(t, y) in f {
            if y > amax + EPS {
                continue;
            }
            self.push(Label {
                tau: t + init,
                soc: y.min(amax),
                station,
                profile: identity,
                vertex: l.vertex,
                parent: idx,
                via: SPAWN,
                key: 0.0,
            });
        }
    }

    fn scan(&mut self, idx: u32, l: &Label) {
        let mut arcs = std::mem::take(&mut self.arcs);
        arcs.clear();
        self.sg.out_arcs(l.vertex, &mut arcs);
        let amax = self.cf(l.station).alpha_max();
        let mut f = std::mem::take(&mut self.scratch);
        for a in &arcs {
            let profile = l.profile.link(&a.profile);
            if !profile.is_feasible() || profile.in_min > amax {
                continue;
            }
            let next = Label {
                tau: l.tau + a.drive,
                soc: l.soc,
                station: l.station,
                profile,
                vertex: a.head,
                parent: idx,
                via: a.id,
                key: 0.0,
            };
            if !self.cfg.one_label_per_head {
                self.scratch = std::mem::take(&mut f);
                self.push(next);
                f = std::mem::take(&mut self.scratch);
                continue;
            }
            self.function_of(&next, &mut f);
            if f.is_empty() {
                continue;
            }
            let key = self.pot.key(next.vertex, &f);
            if !key.is_finite() {
                continue;
            }
            match self.pending.iter_mut().find(|p| p.0.vertex == next.vertex) {
                Some(p) if key < p.1 => *p = (next, key, f[0].1),
                Some(_) => {}
                None => self.pending.push((next, key, f[0].1)),
            }
        }
        for (mut next, key, tie) in std::mem::take(&mut self.pending) {
            next.key = key;
            self.insert(next, tie);
        }
        self.scratch = f;
        self.arcs = arcs;
    }

    fn retrieve(&self, last: u32) -> Result<RawRoute, SearchError> {
        let chain = self.chain(last)?;
        let mut f = Vec::new();
        self.function_of(&self.labels[last as usize], &mut f);
        let trip_time = f[0].0;
        let mut events = Vec::new();
        for (k, &idx) in chain.iter().enumerate().skip(1) {
            let l = &self.labels[idx as usize];
            let parent = &self.labels[l.parent as usize];
            if l.via != SPAWN {
                events.push(Event::Arc {
                    id: l.via,
                    tail: parent.vertex,
                    head: l.vertex,
                    drive: l.tau - parent.tau,
                });
                continue;
            }
            let cf = &self.g.stations()[l.station as usize].cf;
            let end = chain[k + 1..]
                .iter()
                .map(|&i| &self.labels[i as usize])
                .find(|x| x.via == SPAWN)
                .map(|next| {
                    let before = &self.labels[next.parent as usize];
                    next.tau - self.g.stations()[next.station as usize].cf.init_time() - before.tau
                })
                .unwrap_or_else(|| trip_time - self.labels[last as usize].tau);
            let duration = end.max(0.0);
            events.push(Event::Stop {
                vertex: l.vertex,
                arrival_soc: l.soc,
                depart_soc: cf.charge(l.soc, duration),
                duration,
                init_time: cf.init_time(),
            });
        }
        Ok(RawRoute { trip_time, events })
    }

    fn chain(&self, last: u32) -> Result<Vec<u32>, SearchError> {
        let mut chain = vec![last];
        let mut cur = last;
        while self.labels[cur as usize].via != ROOT {
            let p = self.labels[cur as usize].parent;
            if p as usize >= self.labels.len() || chain.len() > self.labels.len() {
                return Err(SearchError::BrokenChain(cur));
            }
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        Ok(chain)
    }
}
