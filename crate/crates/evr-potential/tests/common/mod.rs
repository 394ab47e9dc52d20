#![allow(dead_code)]

use evr_model::{Arc, ChargingFunction, Graph, Station};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CAP: f64 = 40.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn concave_curve(rng: &mut ChaCha8Rng, cap: f64) -> ChargingFunction {
    if rng.gen_bool(0.1) {
        return ChargingFunction::swap(cap, rng.gen_range(2..8) as f64).unwrap();
    }
    let mut segs: Vec<(f64, f64)> = (0..rng.gen_range(1..4))
        .map(|_| (rng.gen_range(1..8) as f64, rng.gen_range(2..15) as f64))
        .collect();
    segs.sort_by(|x, y| (y.1 / y.0).total_cmp(&(x.1 / x.0)));
    let mut pts = vec![(0.0, 0.0)];
    for (dt, db) in segs {
        let (t, b) = pts[pts.len() - 1];
        if b >= cap {
            break;
        }
        pts.push((t + dt, (b + db).min(cap)));
    }
    ChargingFunction::curve(pts, rng.gen_range(0..3) as f64, cap).unwrap()
}

/// Random sparse graph whose consumptions are a nonnegative base plus a
/// height difference, so no cycle has negative consumption.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, station_share: f64) -> Graph {
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
                cf: concave_curve(rng, CAP),
            });
        }
    }
    Graph::new(n, CAP, arcs, stations).unwrap()
}
