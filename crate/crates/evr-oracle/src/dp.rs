use evr_model::{Graph, VertexId, EPS};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Default bound on outer states plus driving labels per query.
pub const DEFAULT_STATE_CAP: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DpError {
    #[error("grid step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("state space exceeds the cap of {cap} (needed at least {needed})")]
    StateCap { needed: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpResult {
    /// Minimum trip time over grid policies; `None` when none is feasible.
    pub trip_time: Option<f64>,
    /// Charging stops of the returned policy.
    pub stops: usize,
    /// Grid states `(station, level)` settled.
    pub states_settled: usize,
    /// Driving labels settled across all driving phases.
    pub labels_settled: usize,
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

/// Arrival at a vertex `time` seconds after departure with `soc` left.
struct Arrival {
    vertex: VertexId,
    time: f64,
    soc: f64,
}

/// All Pareto-optimal (time, SoC) arrivals at stations and at `t` when
/// driving from `v` with `soc` without charging. Arc profiles are applied
/// one by one, so clamping at capacity and the feasibility cutoff are
/// exactly those of the model.
fn drive_phase(
    g: &Graph,
    v: VertexId,
    soc: f64,
    t: VertexId,
    best_soc: &mut [f64],
    touched: &mut Vec<VertexId>,
    budget: &mut usize,
    cap: usize,
) -> Result<Vec<Arrival>, DpError> {
    let mut heap = BinaryHeap::new();
    let mut out = Vec::new();
    heap.push(Reverse((Key(0.0), Key(-soc), v)));
    while let Some(Reverse((Key(time), Key(neg), u))) = heap.pop() {
        let b = -neg;
        // Settled labels at `u` arrive no later; keep only strict SoC gains.
        if b <= best_soc[u as usize] {
            continue;
        }
        if best_soc[u as usize] == f64::NEG_INFINITY {
            touched.push(u);
        }
        best_soc[u as usize] = b;
        *budget += 1;
        if *budget > cap {
            return Err(DpError::StateCap {
                needed: *budget,
                cap,
            });
        }
        if u == t || g.is_station(u) {
            out.push(Arrival {
                vertex: u,
                time,
                soc: b,
            });
        }
        for id in g.out_ids(u) {
            let a = g.arc(id);
            let nb = g.profile(id).apply(b);
            if nb >= 0.0 && nb > best_soc[a.head as usize] {
                heap.push(Reverse((Key(time + a.drive), Key(-nb), a.head)));
            }
        }
    }
    for &u in touched.iter() {
        best_soc[u as usize] = f64::NEG_INFINITY;
    }
    touched.clear();
    Ok(out)
}

/// Departure SoC levels of one station: the multiples of `delta` up to its
/// maximum SoC, plus that maximum.
fn levels(alpha_max: f64, delta: f64) -> Vec<f64> {
    let k = (alpha_max / delta + 1e-9).floor() as usize;
    let mut v: Vec<f64> = (0..=k)
        .map(|i| i as f64 * delta)
        .filter(|&x| x <= alpha_max)
        .collect();
    if v.last().is_none_or(|&x| x < alpha_max) {
        v.push(alpha_max);
    }
    v
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    /// Departure from station `0` (index into the graph's stations) at level `1`.
    Depart(u32, u32),
    Target,
}

/// Minimum trip time from `s` to `t` when every charging stop ends at a
/// grid level `k * delta` or at the station's maximum SoC.
///
/// Driving keeps the exact SoC; only departure SoCs are restricted. Each
/// stop costs the station's init time plus the exact charging duration
/// from the arrival SoC to the chosen level.
pub fn grid_dp_query(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    soc: f64,
    delta: f64,
    cap: usize,
) -> Result<DpResult, DpError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(DpError::BadStep(delta));
    }
    for v in [s, t] {
        if v as usize >= g.num_vertices() {
            return Err(DpError::VertexOutOfRange(v));
        }
    }
    let grids: Vec<Vec<f64>> = g
        .stations()
        .iter()
        .map(|st| levels(st.cf.alpha_max(), delta))
        .collect();
    let states: usize = grids.iter().map(Vec::len).sum();
    if states > cap {
        return Err(DpError::StateCap {
            needed: states,
            cap,
        });
    }
    let offset: Vec<usize> = grids
        .iter()
        .scan(0, |acc, l| {
            let o = *acc;
            *acc += l.len();
            Some(o)
        })
        .collect();
    let mut settled = vec![false; states];
    let mut best = vec![f64::INFINITY; states];
    let mut best_soc = vec![f64::NEG_INFINITY; g.num_vertices()];
    let mut touched = Vec::new();
    let mut budget = states;
    let mut heap: BinaryHeap<Reverse<(Key, usize, Node)>> = BinaryHeap::new();
    let mut result = DpResult {
        trip_time: None,
        stops: 0,
        states_settled: 0,
        labels_settled: 0,
    };

    let relax = |heap: &mut BinaryHeap<_>,
                 best: &mut Vec<f64>,
                 arrivals: Vec<Arrival>,
                 t0: f64,
                 stops: usize| {
        for a in arrivals {
            let at = t0 + a.time;
            if a.vertex == t {
                heap.push(Reverse((Key(at), stops, Node::Target)));
            }
            let Some(idx) = g.station_index(a.vertex) else {
                continue;
            };
            let cf = &g.stations()[idx as usize].cf;
            for (j, &lv) in grids[idx as usize].iter().enumerate() {
                if lv <= a.soc + EPS {
                    continue;
                }
                let dur = cf
                    .duration(a.soc, lv)
                    .expect("levels stay below the station maximum");
                let key = at + cf.init_time() + dur;
                let state = offset[idx as usize] + j;
                if key < best[state] {
                    best[state] = key;
                    heap.push(Reverse((Key(key), stops + 1, Node::Depart(idx, j as u32))));
                }
            }
        }
    };

    let first = drive_phase(g, s, soc, t, &mut best_soc, &mut touched, &mut budget, cap)?;
    relax(&mut heap, &mut best, first, 0.0, 0);
    while let Some(Reverse((Key(time), stops, node))) = heap.pop() {
        match node {
            Node::Target => {
                result.trip_time = Some(time);
                result.stops = stops;
                break;
            }
            Node::Depart(idx, j) => {
                let state = offset[idx as usize] + j as usize;
                if settled[state] {
                    continue;
                }
                settled[state] = true;
                result.states_settled += 1;
                let v = g.stations()[idx as usize].vertex;
                let lv = grids[idx as usize][j as usize];
                let arrivals =
                    drive_phase(g, v, lv, t, &mut best_soc, &mut touched, &mut budget, cap)?;
                relax(&mut heap, &mut best, arrivals, time, stops);
            }
        }
    }
    result.labels_settled = budget - states;
    Ok(result)
}
