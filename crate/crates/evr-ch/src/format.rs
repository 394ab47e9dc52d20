//! Versioned little-endian binary container and a text dump for overlays.
//!
//! Layout after the 8-byte magic and a `u32` version: vertex count,
//! base arc count and capacity, the configuration, core size, the
//! internal-to-original vertex permutation, ranks, the arc table, then the
//! four adjacency arrays. The base graph itself is not stored; reading takes
//! it as input and checks that it matches.

use crate::contract::ChConfig;
use crate::overlay::{renumber, Csr, Origin, Overlay, OverlayArc};
use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use evr_model::{Graph, SocProfile};
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use thiserror::Error;

pub const MAGIC: &[u8; 8] = b"EVROVLY\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("not an overlay file")]
    BadMagic,
    #[error("unsupported overlay version {0}")]
    Version(u32),
    #[error("overlay does not match the graph: {0}")]
    Mismatch(String),
    #[error("corrupt overlay: {0}")]
    Corrupt(String),
}

fn write_u32s<W: Write>(w: &mut W, xs: &[u32]) -> io::Result<()> {
    w.write_u64::<LE>(xs.len() as u64)?;
    for &x in xs {
        w.write_u32::<LE>(x)?;
    }
    Ok(())
}

fn read_u32s<R: Read>(r: &mut R, limit: usize) -> Result<Vec<u32>, FormatError> {
    let len = r.read_u64::<LE>()? as usize;
    if len > limit {
        return Err(FormatError::Corrupt(format!(
            "array of {len} entries exceeds {limit}"
        )));
    }
    let mut v = vec![0u32; len];
    r.read_u32_into::<LE>(&mut v)?;
    Ok(v)
}

impl Overlay {
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LE>(VERSION)?;
        w.write_u64::<LE>(self.graph.num_vertices() as u64)?;
        w.write_u64::<LE>(self.graph.num_arcs() as u64)?;
        w.write_f64::<LE>(self.graph.capacity())?;
        w.write_f64::<LE>(self.config.core_degree)?;
        w.write_u32::<LE>(self.config.label_cap as u32)?;
        w.write_u32::<LE>(self.config.hop_limit)?;
        w.write_u8(self.config.aggressive as u8)?;
        w.write_u64::<LE>(self.core_size as u64)?;
        write_u32s(&mut w, &self.to_original)?;
        write_u32s(&mut w, &self.rank)?;
        w.write_u64::<LE>(self.arcs.len() as u64)?;
        for a in &self.arcs {
            w.write_u32::<LE>(a.tail)?;
            w.write_u32::<LE>(a.head)?;
            w.write_f64::<LE>(a.drive)?;
            w.write_f64::<LE>(a.profile.in_min)?;
            w.write_f64::<LE>(a.profile.cost)?;
            w.write_f64::<LE>(a.profile.out_max)?;
            let (tag, x, y) = match a.origin {
                Origin::Base(b) => (0u8, b, 0),
                Origin::Shortcut(x, y) => (1u8, x, y),
            };
            w.write_u8(tag)?;
            w.write_u32::<LE>(x)?;
            w.write_u32::<LE>(y)?;
        }
        for csr in [&self.up_out, &self.down_in, &self.core_out, &self.core_in] {
            write_u32s(&mut w, &csr.first)?;
            write_u32s(&mut w, &csr.ids)?;
        }
        w.flush()
    }

    /// Reads an overlay built for `g` (in original numbering).
    pub fn read_binary<R: Read>(mut r: R, g: &Graph) -> Result<Overlay, FormatError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(FormatError::BadMagic);
        }
        let version = r.read_u32::<LE>()?;
        if version != VERSION {
            return Err(FormatError::Version(version));
        }
        let n = r.read_u64::<LE>()? as usize;
        let m = r.read_u64::<LE>()? as usize;
        let capacity = r.read_f64::<LE>()?;
        if n != g.num_vertices() || m != g.num_arcs() || capacity != g.capacity() {
            return Err(FormatError::Mismatch(format!(
                "file has {n} vertices, {m} arcs, capacity {capacity}; graph has {}, {}, {}",
                g.num_vertices(),
                g.num_arcs(),
                g.capacity()
            )));
        }
        let config = ChConfig {
            core_degree: r.read_f64::<LE>()?,
            label_cap: r.read_u32::<LE>()? as usize,
            hop_limit: r.read_u32::<LE>()?,
            aggressive: r.read_u8()? != 0,
        };
        let core_size = r.read_u64::<LE>()? as usize;
        let to_original = read_u32s(&mut r, n)?;
        let rank = read_u32s(&mut r, n)?;
        if to_original.len() != n || rank.len() != n || core_size > n {
            return Err(FormatError::Corrupt(
                "vertex arrays have the wrong length".into(),
            ));
        }
        let mut to_internal = vec![u32::MAX; n];
        for (i, &v) in to_original.iter().enumerate() {
            if v as usize >= n || to_internal[v as usize] != u32::MAX {
                return Err(FormatError::Corrupt(
                    "vertex permutation is not a bijection".into(),
                ));
            }
            to_internal[v as usize] = i as u32;
        }
        let num_arcs = r.read_u64::<LE>()? as usize;
        let mut arcs = Vec::with_capacity(num_arcs.min(1 << 24));
        for i in 0..num_arcs {
            let tail = r.read_u32::<LE>()?;
            let head = r.read_u32::<LE>()?;
            let drive = r.read_f64::<LE>()?;
            let profile = SocProfile::new(
                r.read_f64::<LE>()?,
                r.read_f64::<LE>()?,
                r.read_f64::<LE>()?,
            );
            let tag = r.read_u8()?;
            let (x, y) = (r.read_u32::<LE>()?, r.read_u32::<LE>()?);
            let origin = match tag {
                0 if (x as usize) < m => Origin::Base(x),
                1 if (x as usize) < i && (y as usize) < i => Origin::Shortcut(x, y),
                _ => {
                    return Err(FormatError::Corrupt(format!(
                        "arc {i} has an invalid origin"
                    )))
                }
            };
            if tail as usize >= n || head as usize >= n {
                return Err(FormatError::Corrupt(format!(
                    "arc {i} has an endpoint out of range"
                )));
            }
            arcs.push(OverlayArc {
                tail,
                head,
                drive,
                profile,
                origin,
            });
        }
        let mut csrs = Vec::new();
        for _ in 0..4 {
            let first = read_u32s(&mut r, n + 1)?;
            let ids = read_u32s(&mut r, num_arcs.saturating_mul(2).max(1 << 20))?;
            let ok = first.len() == n + 1
                && first[0] == 0
                && first.windows(2).all(|w| w[0] <= w[1])
                && first[n] as usize == ids.len()
                && ids.iter().all(|&id| (id as usize) < num_arcs);
            if !ok {
                return Err(FormatError::Corrupt("malformed adjacency array".into()));
            }
            csrs.push(Csr { first, ids });
        }
        if let Some(st) = g
            .stations()
            .iter()
            .find(|st| to_internal[st.vertex as usize] as usize >= core_size)
        {
            return Err(FormatError::Mismatch(format!(
                "station at vertex {} lies outside the core",
                st.vertex
            )));
        }
        let (graph, arc_to_original) = renumber(g, &to_internal);
        let core_in = csrs.pop().unwrap();
        let core_out = csrs.pop().unwrap();
        let down_in = csrs.pop().unwrap();
        let up_out = csrs.pop().unwrap();
        Ok(Overlay {
            graph,
            config,
            to_original,
            to_internal,
            arc_to_original,
            rank,
            core_size,
            arcs,
            up_out,
            down_in,
            core_out,
            core_in,
        })
    }

    /// The same hierarchy over `g`, a graph with identical arcs whose
    /// stations may carry other charging functions. Exact overlays do not
    /// depend on charging functions; aggressive ones depend on the best
    /// charging rate, which must then be unchanged.
    pub fn rebind(&self, g: &Graph) -> Result<Overlay, FormatError> {
        if self.config.aggressive && g.max_rate() != self.graph.max_rate() {
            return Err(FormatError::Mismatch(format!(
                "aggressive overlay built for best rate {}, graph has {}",
                self.graph.max_rate(),
                g.max_rate()
            )));
        }
        let mut buf = Vec::new();
        self.write_binary(&mut buf)?;
        let ov = Overlay::read_binary(&buf[..], g)?;
        if ov.graph.arcs() != self.graph.arcs() {
            return Err(FormatError::Mismatch("arcs differ".into()));
        }
        Ok(ov)
    }

    /// Line-oriented dump for diffing, in internal ids.
    pub fn text_dump(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(
            s,
            "overlay v{VERSION} n {} core {} arcs {} shortcuts {} core_degree {} label_cap {} hop_limit {} aggressive {}",
            self.num_vertices(),
            self.core_size,
            self.overlay_arc_ids().len(),
            self.num_shortcuts(),
            c.core_degree,
            c.label_cap,
            c.hop_limit,
            c.aggressive
        );
        for v in 0..self.num_vertices() as u32 {
            let rank = match self.rank(v) {
                crate::CORE_RANK => "core".to_string(),
                r => r.to_string(),
            };
            let _ = writeln!(s, "v {v} original {} rank {rank}", self.to_original(v));
        }
        for id in self.overlay_arc_ids() {
            let a = &self.arcs[id as usize];
            let origin = match a.origin {
                Origin::Base(b) => format!("base {b}"),
                Origin::Shortcut(x, y) => format!("via {x} {y}"),
            };
            let _ = writeln!(
                s,
                "a {id} {} {} {:.6} {:.6} {:.6} {:.6} {origin}",
                a.tail, a.head, a.drive, a.profile.in_min, a.profile.cost, a.profile.out_max
            );
        }
        s
    }
}
