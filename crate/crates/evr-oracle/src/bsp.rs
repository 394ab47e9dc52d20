use evr_model::{Graph, VertexId};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BspError {
    #[error("arc {0} has negative consumption")]
    NegativeArc(u32),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
}

/// Minimum driving time from `s` to `t` among paths whose total
/// consumption is at most `budget`, ignoring stations. Requires
/// nonnegative consumption, under which the battery never clamps.
pub fn bsp_reference(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    budget: f64,
) -> Result<Option<f64>, BspError> {
    if let Some(id) = g.arcs().iter().position(|a| a.cons < 0.0) {
        return Err(BspError::NegativeArc(id as u32));
    }
    for v in [s, t] {
        if v as usize >= g.num_vertices() {
            return Err(BspError::VertexOutOfRange(v));
        }
    }
    // Labels are (time, consumed); a label is kept only if it consumes
    // strictly less than every earlier-settled label at its vertex.
    let mut least = vec![f64::INFINITY; g.num_vertices()];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((time_key(0.0), time_key(0.0), s)));
    while let Some(Reverse((tk, ck, v))) = heap.pop() {
        let (time, used) = (f64::from_bits(tk), f64::from_bits(ck));
        if used >= least[v as usize] {
            continue;
        }
        least[v as usize] = used;
        if v == t {
            return Ok(Some(time));
        }
        for id in g.out_ids(v) {
            let a = g.arc(id);
            let nu = used + a.cons;
            if nu <= budget + 1e-9 && nu < least[a.head as usize] {
                heap.push(Reverse((time_key(time + a.drive), time_key(nu), a.head)));
            }
        }
    }
    Ok(None)
}

/// Order-preserving key for nonnegative finite floats.
fn time_key(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    x.to_bits()
}
