use evr_io::{Instance, Query, StationSpec};
use evr_model::{Arc, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape of the small random instances used for cross-checking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusParams {
    pub max_vertices: usize,
    pub max_stations: usize,
    pub capacity: f64,
    pub queries: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_vertices: 50,
            max_stations: 3,
            capacity: 20.0,
            queries: 10,
        }
    }
}

fn milli(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// A random concave charging curve from `(0, 0)` to at most `capacity`,
/// on a milli grid so it survives the text format.
fn random_curve(rng: &mut ChaCha8Rng, capacity: f64) -> Vec<(f64, f64)> {
    let k = rng.gen_range(1..=4);
    let mut slopes: Vec<f64> = (0..k).map(|_| milli(rng.gen_range(0.2..3.0))).collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    slopes.dedup();
    let top = if rng.gen_bool(0.8) {
        capacity
    } else {
        milli(rng.gen_range(0.5..1.0) * capacity)
    };
    let mut pts = vec![(0.0, 0.0)];
    let (mut t, mut b) = (0.0, 0.0);
    for (i, &s) in slopes.iter().enumerate() {
        let nb = if i + 1 == slopes.len() {
            top
        } else {
            milli(b + (top - b) * rng.gen_range(0.2..0.7))
        };
        if nb <= b {
            continue;
        }
        t = milli(t + (nb - b) / s).max(t + 0.001);
        b = nb;
        pts.push((t, b));
    }
    // Rounding may break concavity; fall back to a single segment then.
    let concave = pts
        .windows(3)
        .all(|w| (w[2].1 - w[1].1) * (w[1].0 - w[0].0) < (w[1].1 - w[0].1) * (w[2].0 - w[1].0));
    if concave {
        pts
    } else {
        vec![(0.0, 0.0), (milli(top / slopes[0]).max(0.001), top)]
    }
}

/// One random instance with up to `max_vertices` vertices and
/// `max_stations` stations, plus random queries.
///
/// A two-way ring keeps every vertex reachable; random chords add
/// alternatives. Consumption is a nonnegative term plus a vertex potential
/// difference, so no cycle gains energy while some arcs recuperate.
pub fn random_instance(seed: u64, p: &CorpusParams) -> (Instance, Vec<Query>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=p.max_vertices.max(2));
    let m = p.capacity;
    let pot: Vec<f64> = (0..n)
        .map(|_| milli(rng.gen_range(0.0..0.15 * m)))
        .collect();
    let mut pairs = Vec::new();
    for u in 0..n {
        let v = (u + 1) % n;
        if n > 2 || u == 0 {
            pairs.push((u, v));
            pairs.push((v, u));
        }
    }
    for u in 0..n {
        for _ in 0..rng.gen_range(0..=2) {
            let v = rng.gen_range(0..n);
            if v != u {
                pairs.push((u, v));
            }
        }
    }
    let arcs = pairs
        .into_iter()
        .map(|(u, v)| Arc {
            tail: u as VertexId,
            head: v as VertexId,
            drive: milli(rng.gen_range(1.0..10.0)),
            cons: milli(milli(rng.gen_range(0.02..0.3) * m) + pot[v] - pot[u]),
        })
        .collect();
    let k = if rng.gen_bool(0.1) {
        0
    } else {
        rng.gen_range(1..=p.max_stations.max(1))
    }
    .min(n);
    let mut verts: Vec<VertexId> = rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(|v| v as VertexId)
        .collect();
    verts.sort_unstable();
    let stations = verts
        .into_iter()
        .map(|vertex| {
            let init = milli(rng.gen_range(0.0..2.0));
            if rng.gen_bool(0.15) {
                StationSpec::Swap {
                    vertex,
                    init: init.max(0.5),
                }
            } else {
                StationSpec::Curve {
                    vertex,
                    init,
                    points: random_curve(&mut rng, m),
                }
            }
        })
        .collect();
    let queries = (0..p.queries)
        .map(|_| Query {
            source: rng.gen_range(0..n) as VertexId,
            target: rng.gen_range(0..n) as VertexId,
            soc: milli(rng.gen_range(0.0..m)),
        })
        .collect();
    (
        Instance {
            n,
            capacity: m,
            arcs,
            stations,
        },
        queries,
    )
}
