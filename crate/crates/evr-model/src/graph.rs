//! Directed road graph with charging stations.

use crate::charging::ChargingFunction;
use crate::error::ModelError;
use crate::profile::SocProfile;
use crate::{VertexId, NONE};
use std::cmp::Ordering;
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    /// Driving time in seconds, strictly positive.
    pub drive: f64,
    /// Energy consumption in Wh; negative values model recuperation.
    pub cons: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Station {
    pub vertex: VertexId,
    pub cf: ChargingFunction,
}

/// Immutable graph in compressed adjacency form.
///
/// Arcs are sorted by `(tail, head, drive, cons)`; an arc's index in that
/// order is its id. Stations are sorted by vertex.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    capacity: f64,
    arcs: Vec<Arc>,
    profiles: Vec<SocProfile>,
    first_out: Vec<u32>,
    first_in: Vec<u32>,
    in_arcs: Vec<u32>,
    stations: Vec<Station>,
    station_of: Vec<u32>,
    max_rate: f64,
}

fn arc_order(a: &Arc, b: &Arc) -> Ordering {
    (a.tail, a.head)
        .cmp(&(b.tail, b.head))
        .then(a.drive.total_cmp(&b.drive))
        .then(a.cons.total_cmp(&b.cons))
}

impl Graph {
    pub fn new(
        n: usize,
        capacity: f64,
        mut arcs: Vec<Arc>,
        mut stations: Vec<Station>,
    ) -> Result<Graph, ModelError> {
        if !(capacity > 0.0 && capacity.is_finite()) {
            return Err(ModelError::BadCapacity(capacity));
        }
        for (index, a) in arcs.iter().enumerate() {
            let reason = if a.tail as usize >= n || a.head as usize >= n {
                Some(format!("endpoint out of range (n = {n})"))
            } else if !(a.drive > 0.0 && a.drive.is_finite()) {
                Some(format!(
                    "drive time must be positive and finite, got {}",
                    a.drive
                ))
            } else if !a.cons.is_finite() {
                Some(format!("consumption must be finite, got {}", a.cons))
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(ModelError::BadArc {
                    index,
                    tail: a.tail,
                    head: a.head,
                    reason,
                });
            }
        }
        arcs.sort_by(arc_order);
        stations.sort_by_key(|s| s.vertex);
        let mut station_of = vec![NONE; n];
        for (i, s) in stations.iter().enumerate() {
            if s.vertex as usize >= n {
                return Err(ModelError::BadStation {
                    vertex: s.vertex,
                    reason: format!("vertex out of range (n = {n})"),
                });
            }
            if station_of[s.vertex as usize] != NONE {
                return Err(ModelError::BadStation {
                    vertex: s.vertex,
                    reason: "duplicate station".into(),
                });
            }
            if s.cf.alpha_max() > capacity + crate::EPS {
                return Err(ModelError::BadStation {
                    vertex: s.vertex,
                    reason: format!(
                        "maximum SoC {} exceeds capacity {capacity}",
                        s.cf.alpha_max()
                    ),
                });
            }
            station_of[s.vertex as usize] = i as u32;
        }
        let mut first_out = vec![0u32; n + 1];
        let mut indeg = vec![0u32; n + 1];
        for a in &arcs {
            first_out[a.tail as usize + 1] += 1;
            indeg[a.head as usize + 1] += 1;
        }
        for v in 0..n {
            first_out[v + 1] += first_out[v];
            indeg[v + 1] += indeg[v];
        }
        let first_in = indeg.clone();
        let mut fill = indeg;
        let mut in_arcs = vec![0u32; arcs.len()];
        for (id, a) in arcs.iter().enumerate() {
            let slot = &mut fill[a.head as usize];
            in_arcs[*slot as usize] = id as u32;
            *slot += 1;
        }
        let profiles = arcs
            .iter()
            .map(|a| SocProfile::arc(a.cons, capacity))
            .collect();
        let max_rate = stations.iter().map(|s| s.cf.max_rate()).fold(0.0, f64::max);
        Ok(Graph {
            n,
            capacity,
            arcs,
            profiles,
            first_out,
            first_in,
            in_arcs,
            stations,
            station_of,
            max_rate,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    /// Battery capacity `M` in Wh.
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: u32) -> &Arc {
        &self.arcs[id as usize]
    }

    pub fn profile(&self, id: u32) -> &SocProfile {
        &self.profiles[id as usize]
    }

    /// Ids of arcs leaving `v`, in adjacency order.
    pub fn out_ids(&self, v: VertexId) -> std::ops::Range<u32> {
        self.first_out[v as usize]..self.first_out[v as usize + 1]
    }

    /// Ids of arcs entering `v`.
    pub fn in_ids(&self, v: VertexId) -> &[u32] {
        &self.in_arcs[self.first_in[v as usize] as usize..self.first_in[v as usize + 1] as usize]
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn station_at(&self, v: VertexId) -> Option<&Station> {
        match self.station_of[v as usize] {
            NONE => None,
            i => Some(&self.stations[i as usize]),
        }
    }

    /// Index into [`Graph::stations`] of the station at `v`.
    pub fn station_index(&self, v: VertexId) -> Option<u32> {
        match self.station_of[v as usize] {
            NONE => None,
            i => Some(i),
        }
    }

    pub fn is_station(&self, v: VertexId) -> bool {
        self.station_of[v as usize] != NONE
    }

    /// Largest charging rate over all stations (0 without stations).
    pub fn max_rate(&self) -> f64 {
        self.max_rate
    }

    /// Rejects graphs with a cycle of negative total consumption.
    pub fn check_consumption_cycles(&self) -> Result<(), ModelError> {
        let n = self.n;
        let mut dist = vec![0.0f64; n];
        let mut count = vec![0usize; n];
        let mut queued = vec![true; n];
        let mut queue: VecDeque<u32> = (0..n as u32).collect();
        while let Some(v) = queue.pop_front() {
            queued[v as usize] = false;
            for id in self.out_ids(v) {
                let a = &self.arcs[id as usize];
                let cand = dist[v as usize] + a.cons;
                if cand < dist[a.head as usize] - crate::EPS {
                    dist[a.head as usize] = cand;
                    count[a.head as usize] += 1;
                    if count[a.head as usize] > n {
                        return Err(ModelError::NegativeCycle(a.head));
                    }
                    if !queued[a.head as usize] {
                        queued[a.head as usize] = true;
                        queue.push_back(a.head);
                    }
                }
            }
        }
        Ok(())
    }
}
