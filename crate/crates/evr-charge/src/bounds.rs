use evr_ch::Overlay;
use evr_model::VertexId;
use evr_potential::ConvexBound;

/// Incoming connection of a core vertex as seen by the potential searches.
#[derive(Clone, Debug, PartialEq)]
pub enum CoreEntry {
    /// A single arc from the tail.
    Point { cons: f64, drive: f64 },
    /// Several parallel arcs from the tail, summarized by the hull of their
    /// `(cost, drive)` points.
    Hull(ConvexBound),
}

/// Per core vertex, its incoming core connections grouped by tail.
///
/// A hull lies below every `(cost, drive)` point of its arcs, and each arc
/// needs at least its cost in SoC, so linking a hull with the head's bound
/// never exceeds shifting that bound along any single arc.
#[derive(Clone, Debug, Default)]
pub struct CoreBounds {
    first: Vec<u32>,
    entries: Vec<(VertexId, CoreEntry)>,
}

impl CoreBounds {
    pub fn build(ov: &Overlay) -> CoreBounds {
        let mut first = Vec::with_capacity(ov.core_size() + 1);
        let mut entries = Vec::new();
        first.push(0);
        for v in 0..ov.core_size() as VertexId {
            let ids = ov.core_in(v);
            let mut i = 0;
            while i < ids.len() {
                let tail = ov.arc(ids[i]).tail;
                let mut j = i;
                while j < ids.len() && ov.arc(ids[j]).tail == tail {
                    j += 1;
                }
                let entry = if j - i == 1 {
                    let a = ov.arc(ids[i]);
                    CoreEntry::Point {
                        cons: a.profile.cost,
                        drive: a.drive,
                    }
                } else {
                    CoreEntry::Hull(ConvexBound::from_points(ids[i..j].iter().map(|&id| {
                        let a = ov.arc(id);
                        (a.profile.cost, a.drive)
                    })))
                };
                entries.push((tail, entry));
                i = j;
            }
            first.push(entries.len() as u32);
        }
        CoreBounds { first, entries }
    }

    /// Entries into core vertex `v`; empty for other vertices.
    pub fn of(&self, v: VertexId) -> &[(VertexId, CoreEntry)] {
        let v = v as usize;
        if v + 1 >= self.first.len() {
            return &[];
        }
        &self.entries[self.first[v] as usize..self.first[v + 1] as usize]
    }

    pub fn num_hulls(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.1, CoreEntry::Hull(_)))
            .count()
    }
}
