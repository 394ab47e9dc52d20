#![allow(dead_code)]

use evr_model::{Arc, ChargingFunction, Graph, Station};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn curve(rng: &mut ChaCha8Rng, cap: f64) -> ChargingFunction {
    if rng.gen_bool(0.1) {
        return ChargingFunction::swap(cap, 5.0).unwrap();
    }
    let fast = rng.gen_range(2..6) as f64;
    let pts = vec![
        (0.0, 0.0),
        (cap * 0.8 / fast, cap * 0.8),
        (cap * 0.8 / fast + cap * 0.2 / (fast / 4.0), cap),
    ];
    ChargingFunction::curve(pts, rng.gen_range(0..4) as f64, cap).unwrap()
}

/// Road-like graph on a `side` x `side` grid with missing edges, random
/// diagonals and elevations. Consumption is a nonnegative rolling term plus
/// the height difference, so no cycle gains energy. Integer drive times keep
/// sums exact.
pub fn grid_graph(rng: &mut ChaCha8Rng, side: usize, cap: f64, station_share: f64) -> Graph {
    let n = side * side;
    let height: Vec<f64> = (0..n).map(|_| rng.gen_range(0..30) as f64).collect();
    let mut arcs = Vec::new();
    let id = |x: usize, y: usize| (y * side + x) as u32;
    for y in 0..side {
        for x in 0..side {
            let mut nbrs = Vec::new();
            if x + 1 < side {
                nbrs.push(id(x + 1, y));
            }
            if y + 1 < side {
                nbrs.push(id(x, y + 1));
            }
            if x + 1 < side && y + 1 < side && rng.gen_bool(0.2) {
                nbrs.push(id(x + 1, y + 1));
            }
            for w in nbrs {
                if rng.gen_bool(0.1) {
                    continue;
                }
                let v = id(x, y);
                let drive = rng.gen_range(5..60) as f64;
                let roll = rng.gen_range(1..25) as f64;
                for (a, b) in [(v, w), (w, v)] {
                    arcs.push(Arc {
                        tail: a,
                        head: b,
                        drive,
                        cons: roll + height[b as usize] - height[a as usize],
                    });
                }
            }
        }
    }
    let mut stations = Vec::new();
    for v in 0..n as u32 {
        if rng.gen_bool(station_share) {
            stations.push(Station {
                vertex: v,
                cf: curve(rng, cap),
            });
        }
    }
    Graph::new(n, cap, arcs, stations).unwrap()
}

/// Sparse random graph with small battery, so that most longer routes need
/// a charging stop. Consumption is a nonnegative base plus a height
/// difference.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, cap: f64, station_share: f64) -> Graph {
    let height: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
    let mut arcs = Vec::new();
    for v in 0..n as u32 {
        for _ in 0..rng.gen_range(1..4) {
            let w = rng.gen_range(0..n as u32);
            if w == v {
                continue;
            }
            let drive = rng.gen_range(1..20) as f64;
            let base = rng.gen_range(0..10) as f64;
            for (a, b) in [(v, w), (w, v)] {
                arcs.push(Arc {
                    tail: a,
                    head: b,
                    drive,
                    cons: base + height[b as usize] - height[a as usize],
                });
            }
        }
    }
    let mut stations = Vec::new();
    for v in 0..n as u32 {
        if rng.gen_bool(station_share) {
            stations.push(Station {
                vertex: v,
                cf: curve(rng, cap),
            });
        }
    }
    Graph::new(n, cap, arcs, stations).unwrap()
}

/// Trip time of a plain search on `g`, and its itinerary.
pub fn plain(g: &Graph, s: u32, t: u32, soc: f64) -> (Option<evr_cfp::Itinerary>, evr_cfp::Stats) {
    let out = evr_cfp::cfp_query(
        g,
        g,
        &mut evr_model::ZeroPotential,
        s,
        t,
        soc,
        evr_cfp::Config::default(),
    )
    .unwrap();
    let it = out.route.map(|r| evr_cfp::Itinerary::from_route(g, s, &r));
    (it, out.stats)
}
