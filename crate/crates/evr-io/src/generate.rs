use crate::format::{Instance, StationSpec};
use crate::scenario::{assign_scenario, Scenario};
use evr_model::{Arc, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Parameters of the synthetic road network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    /// Average number of arcs leaving a vertex.
    pub avg_degree: f64,
    /// Share of vertices with a charging station.
    pub station_fraction: f64,
    /// Scales the RMS edge grade; 1 gives roughly 10% recuperating arcs.
    pub roughness: f64,
    pub capacity: f64,
    pub scenario: Scenario,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 10_000,
            avg_degree: 3.0,
            station_fraction: 0.01,
            roughness: 1.0,
            capacity: 16_000.0,
            scenario: Scenario::Mixed,
            seed: 1,
        }
    }
}

/// Spacing of the jittered vertex lattice in meters.
const CELL_M: f64 = 1200.0;
/// Potential energy of the vehicle per meter of height, in Wh.
const WH_PER_M: f64 = 4.087;
/// RMS edge grade at roughness 1.
const RMS_GRADE: f64 = 0.035;
/// Road classes: speed in km/h and relative frequency.
const CLASSES: [(f64, f64); 5] = [
    (30.0, 0.1),
    (50.0, 0.35),
    (70.0, 0.3),
    (100.0, 0.15),
    (130.0, 0.1),
];

struct Dsu(Vec<u32>);

impl Dsu {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let p = self.0[self.0[x as usize] as usize];
            self.0[x as usize] = p;
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra as usize] = rb;
        ra != rb
    }
}

/// Smooth elevation in meters: a few long plane waves plus vertex noise.
struct Terrain {
    waves: Vec<(f64, f64, f64, f64)>,
}

impl Terrain {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let waves = (0..6)
            .map(|_| {
                let theta = rng.gen_range(0.0..PI);
                let wavelength = rng.gen_range(3_000.0..15_000.0);
                let k = 2.0 * PI / wavelength;
                (
                    k * theta.cos(),
                    k * theta.sin(),
                    rng.gen_range(20.0..60.0),
                    rng.gen_range(0.0..2.0 * PI),
                )
            })
            .collect();
        Terrain { waves }
    }

    fn height(&self, x: f64, y: f64) -> f64 {
        self.waves
            .iter()
            .map(|&(kx, ky, a, ph)| a * (kx * x + ky * y + ph).sin())
            .sum()
    }
}

/// A connected, nearly planar road network on a jittered lattice.
///
/// Consumption is a nonnegative rolling term plus the difference of a vertex
/// potential, all in integer milli-Wh, so every cycle consumes a
/// nonnegative amount exactly. Drive times and consumptions have at most
/// three decimals and survive the text format unchanged.
pub fn generate_synthetic(p: &GenParams) -> Instance {
    let n = p.n;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let side = (n as f64).sqrt().ceil().max(1.0) as usize;
    let pos: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (cx, cy) = ((i % side) as f64, (i / side) as f64);
            (
                (cx + rng.gen_range(-0.35..0.35)) * CELL_M,
                (cy + rng.gen_range(-0.35..0.35)) * CELL_M,
            )
        })
        .collect();
    let terrain = Terrain::new(&mut rng);
    let height: Vec<f64> = pos
        .iter()
        .map(|&(x, y)| terrain.height(x, y) + rng.gen_range(-5.0..5.0))
        .collect();

    let mut cand: Vec<(u32, u32)> = Vec::new();
    for i in 0..n {
        let x = i % side;
        let mut push = |j: usize| {
            if j < n {
                cand.push((i as u32, j as u32));
            }
        };
        if x + 1 < side {
            push(i + 1);
            push(i + side + 1);
        }
        if x > 0 {
            push(i + side - 1);
        }
        push(i + side);
    }
    cand.shuffle(&mut rng);
    let mut dsu = Dsu((0..n as u32).collect());
    let (mut tree, mut rest) = (Vec::new(), Vec::new());
    for e in cand {
        if dsu.union(e.0, e.1) {
            tree.push(e);
        } else {
            rest.push(e);
        }
    }
    let wanted = p.avg_degree * n as f64 / 2.0 - tree.len() as f64;
    let keep = if rest.is_empty() {
        0.0
    } else {
        (wanted / rest.len() as f64).clamp(0.0, 1.0)
    };
    let mut edges = tree;
    edges.extend(rest.into_iter().filter(|_| rng.gen_bool(keep)));
    edges.sort_unstable();

    // Scale heights so the RMS grade over the chosen edges is fixed.
    let (sq, cnt) = edges.iter().fold((0.0, 0usize), |(sq, cnt), &(a, b)| {
        let (pa, pb) = (pos[a as usize], pos[b as usize]);
        let d = ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt();
        let grade = (height[b as usize] - height[a as usize]) / d;
        (sq + grade * grade, cnt + 1)
    });
    let rms = (sq / cnt.max(1) as f64).sqrt();
    let scale = if rms > 0.0 {
        p.roughness * RMS_GRADE / rms
    } else {
        0.0
    };
    let potential: Vec<i64> = height
        .iter()
        .map(|h| (h * scale * WH_PER_M * 1000.0).round() as i64)
        .collect();

    let mut arcs = Vec::with_capacity(2 * edges.len());
    for (a, b) in edges {
        let (pa, pb) = (pos[a as usize], pos[b as usize]);
        let length =
            ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt() * rng.gen_range(1.0..1.3);
        let mut pick = rng.gen_range(0.0..1.0);
        let mut speed = CLASSES[CLASSES.len() - 1].0;
        for &(v, share) in &CLASSES {
            if pick < share {
                speed = v;
                break;
            }
            pick -= share;
        }
        let drive_ms = ((length / (speed / 3.6)) * 1000.0).round().max(1.0) as i64;
        let wh_per_km = 110.0 + 0.012 * speed * speed;
        let roll = (length / 1000.0 * wh_per_km * 1000.0).round() as i64;
        for (u, v) in [(a, b), (b, a)] {
            let cons = roll + potential[v as usize] - potential[u as usize];
            arcs.push(Arc {
                tail: u,
                head: v,
                drive: drive_ms as f64 / 1000.0,
                cons: cons as f64 / 1000.0,
            });
        }
    }

    let k = if p.station_fraction > 0.0 && n > 0 {
        ((n as f64 * p.station_fraction).round() as usize).clamp(1, n)
    } else {
        0
    };
    let mut chosen: Vec<VertexId> = rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(|v| v as VertexId)
        .collect();
    chosen.sort_unstable();
    let stations = assign_scenario(&chosen, p.scenario, p.seed ^ 0x5eed)
        .into_iter()
        .map(|(vertex, kind)| StationSpec::Typed { vertex, kind })
        .collect();
    Instance {
        n,
        capacity: p.capacity,
        arcs,
        stations,
    }
}

impl Instance {
    /// The same network with its stations retyped for `scenario`.
    pub fn with_scenario(&self, scenario: Scenario, seed: u64) -> Instance {
        let mut vertices: Vec<VertexId> = self.stations.iter().map(StationSpec::vertex).collect();
        vertices.sort_unstable();
        Instance {
            stations: assign_scenario(&vertices, scenario, seed)
                .into_iter()
                .map(|(vertex, kind)| StationSpec::Typed { vertex, kind })
                .collect(),
            ..self.clone()
        }
    }
}
