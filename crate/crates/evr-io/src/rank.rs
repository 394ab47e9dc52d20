use evr_model::{Graph, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("rank {rank} exceeds the {reachable} vertices reachable from the sampled sources")]
pub struct RankError {
    pub rank: usize,
    pub reachable: usize,
}

/// A query whose target is the `2^rank_log`-th vertex settled by a
/// driving-time Dijkstra from the source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankQuery {
    pub source: VertexId,
    pub target: VertexId,
    pub rank_log: u32,
    pub soc: f64,
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

/// Vertices in the order a driving-time Dijkstra from `s` settles them,
/// `s` first. Ties go to the smaller vertex id.
pub fn dijkstra_order(g: &Graph, s: VertexId) -> Vec<VertexId> {
    let n = g.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut order = Vec::new();
    dist[s as usize] = 0.0;
    heap.push(Reverse((Key(0.0), s)));
    while let Some(Reverse((Key(d), v))) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        done[v as usize] = true;
        order.push(v);
        for id in g.out_ids(v) {
            let a = g.arc(id);
            let nd = d + a.drive;
            if nd < dist[a.head as usize] {
                dist[a.head as usize] = nd;
                heap.push(Reverse((Key(nd), a.head)));
            }
        }
    }
    order
}

/// For each of `sources` random sources, one query per rank `2^0 ..=
/// 2^max_log`. Sources reaching too few vertices are redrawn; the call fails
/// when no source among `64 * sources` draws reaches enough.
pub fn generate_rank_queries(
    g: &Graph,
    seed: u64,
    max_log: u32,
    sources: usize,
    soc: f64,
) -> Result<Vec<RankQuery>, RankError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let need = 1usize << max_log;
    let n = g.num_vertices();
    let mut out = Vec::new();
    let mut found = 0;
    let mut best = 0;
    for _ in 0..64 * sources.max(1) {
        if found == sources || n == 0 {
            break;
        }
        let s = rng.gen_range(0..n as VertexId);
        let order = dijkstra_order(g, s);
        best = best.max(order.len() - 1);
        if order.len() <= need {
            continue;
        }
        found += 1;
        for k in 0..=max_log {
            out.push(RankQuery {
                source: s,
                target: order[1 << k],
                rank_log: k,
                soc,
            });
        }
    }
    if found < sources {
        return Err(RankError {
            rank: need,
            reachable: best,
        });
    }
    Ok(out)
}

/// `count` queries with uniformly random source and target and the given SoC.
pub fn random_queries(n: usize, count: usize, soc: f64, seed: u64) -> Vec<crate::Query> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| crate::Query {
            source: rng.gen_range(0..n as VertexId),
            target: rng.gen_range(0..n as VertexId),
            soc,
        })
        .collect()
}
