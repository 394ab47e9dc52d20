//! The finished overlay: renumbered graph, arc table and adjacency arrays.

use crate::contract::ChConfig;
use evr_cfp::{SearchArc, SearchGraph};
use evr_model::{Arc, Graph, SocProfile, VertexId};
use std::cmp::Reverse;

/// What an overlay arc stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// A base arc, by its id in [`Overlay::graph`].
    Base(u32),
    /// Two overlay arcs traversed in sequence.
    Shortcut(u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlayArc {
    pub tail: VertexId,
    pub head: VertexId,
    pub drive: f64,
    pub profile: SocProfile,
    pub origin: Origin,
}

/// Compressed adjacency: the arc ids of vertex `v` are
/// `ids[first[v]..first[v + 1]]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Csr {
    pub first: Vec<u32>,
    pub ids: Vec<u32>,
}

impl Csr {
    fn from_lists(lists: &[Vec<u32>]) -> Csr {
        let mut first = Vec::with_capacity(lists.len() + 1);
        let mut ids = Vec::new();
        first.push(0);
        for l in lists {
            ids.extend_from_slice(l);
            first.push(ids.len() as u32);
        }
        Csr { first, ids }
    }

    pub fn of(&self, v: VertexId) -> &[u32] {
        let v = v as usize;
        &self.ids[self.first[v] as usize..self.first[v + 1] as usize]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Rank of core vertices.
pub const CORE_RANK: u32 = u32::MAX;

/// A partial contraction hierarchy.
///
/// Vertices are renumbered: core vertices occupy `0..core_size` in base-id
/// order, contracted vertices follow from highest to lowest rank. All ids
/// handled by the overlay's methods are internal; [`Overlay::graph`] is the
/// base graph in internal numbering.
#[derive(Clone, Debug)]
pub struct Overlay {
    pub(crate) graph: Graph,
    pub(crate) config: ChConfig,
    pub(crate) to_original: Vec<VertexId>,
    pub(crate) to_internal: Vec<VertexId>,
    pub(crate) arc_to_original: Vec<u32>,
    pub(crate) rank: Vec<u32>,
    pub(crate) core_size: usize,
    pub(crate) arcs: Vec<OverlayArc>,
    pub(crate) up_out: Csr,
    pub(crate) down_in: Csr,
    pub(crate) core_out: Csr,
    pub(crate) core_in: Csr,
}

fn arc_order(a: &Arc, b: &Arc) -> std::cmp::Ordering {
    (a.tail, a.head)
        .cmp(&(b.tail, b.head))
        .then(a.drive.total_cmp(&b.drive))
        .then(a.cons.total_cmp(&b.cons))
}

/// Base graph renumbered by `to_internal`, and for each internal arc id the
/// original arc id.
pub(crate) fn renumber(g: &Graph, to_internal: &[VertexId]) -> (Graph, Vec<u32>) {
    let map = |a: &Arc| Arc {
        tail: to_internal[a.tail as usize],
        head: to_internal[a.head as usize],
        ..*a
    };
    let arcs: Vec<Arc> = g.arcs().iter().map(map).collect();
    let mut order: Vec<u32> = (0..arcs.len() as u32).collect();
    // Stable, like the graph constructor's sort.
    order.sort_by(|&x, &y| arc_order(&arcs[x as usize], &arcs[y as usize]));
    let stations = g
        .stations()
        .iter()
        .map(|s| evr_model::Station {
            vertex: to_internal[s.vertex as usize],
            cf: s.cf.clone(),
        })
        .collect();
    let graph = Graph::new(g.num_vertices(), g.capacity(), arcs, stations)
        .expect("renumbering keeps a valid graph");
    (graph, order)
}

impl Overlay {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        g: &Graph,
        config: ChConfig,
        mut arcs: Vec<OverlayArc>,
        rank: &[u32],
        up_out: &[Vec<u32>],
        down_in: &[Vec<u32>],
        core_out: &[Vec<u32>],
        core_in: &[Vec<u32>],
    ) -> Overlay {
        let n = g.num_vertices();
        let mut to_original: Vec<VertexId> = (0..n as VertexId)
            .filter(|&v| rank[v as usize] == CORE_RANK)
            .collect();
        let core_size = to_original.len();
        let mut contracted: Vec<VertexId> = (0..n as VertexId)
            .filter(|&v| rank[v as usize] != CORE_RANK)
            .collect();
        contracted.sort_by_key(|&v| Reverse(rank[v as usize]));
        to_original.extend(contracted);
        let mut to_internal = vec![0; n];
        for (i, &v) in to_original.iter().enumerate() {
            to_internal[v as usize] = i as VertexId;
        }
        let (graph, arc_to_original) = renumber(g, &to_internal);
        let mut base_to_internal = vec![0u32; arc_to_original.len()];
        for (i, &o) in arc_to_original.iter().enumerate() {
            base_to_internal[o as usize] = i as u32;
        }
        for a in &mut arcs {
            a.tail = to_internal[a.tail as usize];
            a.head = to_internal[a.head as usize];
            if let Origin::Base(id) = &mut a.origin {
                *id = base_to_internal[*id as usize];
            }
        }
        let permute = |lists: &[Vec<u32>]| -> Vec<Vec<u32>> {
            to_original
                .iter()
                .map(|&v| {
                    let mut l = lists[v as usize].clone();
                    l.sort_by(|&x, &y| {
                        let (a, b) = (&arcs[x as usize], &arcs[y as usize]);
                        (a.tail, a.head, a.drive, x)
                            .partial_cmp(&(b.tail, b.head, b.drive, y))
                            .unwrap()
                    });
                    l
                })
                .collect()
        };
        let internal_rank = to_original.iter().map(|&v| rank[v as usize]).collect();
        let empty_if_contracted = |lists: &[Vec<u32>]| -> Vec<Vec<u32>> {
            (0..n)
                .map(|v| {
                    if rank[v] == CORE_RANK {
                        lists[v].clone()
                    } else {
                        Vec::new()
                    }
                })
                .collect()
        };
        let up_out = Csr::from_lists(&permute(up_out));
        let down_in = Csr::from_lists(&permute(down_in));
        let core_out = Csr::from_lists(&permute(&empty_if_contracted(core_out)));
        let core_in = Csr::from_lists(&permute(&empty_if_contracted(core_in)));
        Overlay {
            graph,
            config,
            to_original,
            to_internal,
            arc_to_original,
            rank: internal_rank,
            core_size,
            arcs,
            up_out,
            down_in,
            core_out,
            core_in,
        }
    }

    /// The base graph in internal numbering.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn config(&self) -> ChConfig {
        self.config
    }

    pub fn is_aggressive(&self) -> bool {
        self.config.aggressive
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn core_size(&self) -> usize {
        self.core_size
    }

    pub fn is_core(&self, v: VertexId) -> bool {
        (v as usize) < self.core_size
    }

    /// Contraction order of `v`, or [`CORE_RANK`].
    pub fn rank(&self, v: VertexId) -> u32 {
        self.rank[v as usize]
    }

    pub fn to_internal(&self, original: VertexId) -> VertexId {
        self.to_internal[original as usize]
    }

    pub fn to_original(&self, internal: VertexId) -> VertexId {
        self.to_original[internal as usize]
    }

    /// Original id of internal base arc `id`.
    pub fn arc_to_original(&self, id: u32) -> u32 {
        self.arc_to_original[id as usize]
    }

    /// Every arc ever created, including shortcuts later superseded; only
    /// arcs listed in an adjacency array are part of the overlay.
    pub fn arcs(&self) -> &[OverlayArc] {
        &self.arcs
    }

    pub fn arc(&self, id: u32) -> &OverlayArc {
        &self.arcs[id as usize]
    }

    /// Arcs from a contracted vertex to higher-ranked or core vertices.
    pub fn up_out(&self, v: VertexId) -> &[u32] {
        self.up_out.of(v)
    }

    /// Arcs into a contracted vertex from higher-ranked or core vertices.
    pub fn down_in(&self, v: VertexId) -> &[u32] {
        self.down_in.of(v)
    }

    /// Arcs between core vertices, by tail.
    pub fn core_out(&self, v: VertexId) -> &[u32] {
        self.core_out.of(v)
    }

    /// Arcs between core vertices, by head.
    pub fn core_in(&self, v: VertexId) -> &[u32] {
        self.core_in.of(v)
    }

    /// Ids of all arcs in the overlay, each once.
    pub fn overlay_arc_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .up_out
            .ids
            .iter()
            .chain(&self.down_in.ids)
            .chain(&self.core_out.ids)
            .copied()
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Number of shortcuts in the overlay.
    pub fn num_shortcuts(&self) -> usize {
        self.overlay_arc_ids()
            .into_iter()
            .filter(|&id| matches!(self.arcs[id as usize].origin, Origin::Shortcut(..)))
            .count()
    }

    /// Number of core arcs divided by the number of core vertices.
    pub fn core_average_degree(&self) -> f64 {
        if self.core_size == 0 {
            0.0
        } else {
            self.core_out.len() as f64 / self.core_size as f64
        }
    }

    /// Appends the base arcs (internal ids) that overlay arc `id` stands for.
    pub fn unpack(&self, id: u32, out: &mut Vec<u32>) {
        let mut stack = vec![id];
        while let Some(a) = stack.pop() {
            match self.arcs[a as usize].origin {
                Origin::Base(b) => out.push(b),
                Origin::Shortcut(x, y) => {
                    stack.push(y);
                    stack.push(x);
                }
            }
        }
    }

    pub(crate) fn search_arc(&self, id: u32) -> SearchArc {
        let a = &self.arcs[id as usize];
        SearchArc {
            head: a.head,
            drive: a.drive,
            profile: a.profile,
            id,
        }
    }
}

/// Forward search graph of the overlay: upward arcs out of contracted
/// vertices and core arcs. Arc ids are overlay arc ids.
impl SearchGraph for Overlay {
    fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    fn out_arcs(&self, v: VertexId, out: &mut Vec<SearchArc>) {
        let ids = if self.is_core(v) {
            self.core_out(v)
        } else {
            self.up_out(v)
        };
        out.extend(ids.iter().map(|&id| self.search_arc(id)));
    }
}
