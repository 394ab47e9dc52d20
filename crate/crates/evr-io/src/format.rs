use crate::library::StationType;
use evr_model::{Arc, ChargingFunction, ChargingKind, Graph, ModelError, Station, VertexId};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line number; 0 for problems with the file as a whole.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid instance: {0}")]
    Invalid(#[from] ModelError),
}

/// A station as written in an instance file.
#[derive(Clone, Debug, PartialEq)]
pub enum StationSpec {
    Swap {
        vertex: VertexId,
        init: f64,
    },
    Curve {
        vertex: VertexId,
        init: f64,
        points: Vec<(f64, f64)>,
    },
    Typed {
        vertex: VertexId,
        kind: StationType,
    },
}

impl StationSpec {
    pub fn vertex(&self) -> VertexId {
        match *self {
            StationSpec::Swap { vertex, .. }
            | StationSpec::Curve { vertex, .. }
            | StationSpec::Typed { vertex, .. } => vertex,
        }
    }

    pub fn charging_function(&self, capacity: f64) -> Result<ChargingFunction, ModelError> {
        let named = |vertex: VertexId, e: ModelError| ModelError::BadStation {
            vertex,
            reason: e.to_string(),
        };
        match self {
            StationSpec::Swap { vertex, init } => {
                ChargingFunction::swap(capacity, *init).map_err(|e| named(*vertex, e))
            }
            StationSpec::Curve {
                vertex,
                init,
                points,
            } => ChargingFunction::curve(points.clone(), *init, capacity)
                .map_err(|e| named(*vertex, e)),
            StationSpec::Typed { kind, .. } => Ok(kind.charging_function(capacity)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleParams {
    pub capacity: f64,
}

/// An instance in file form. Arcs and stations keep their file order.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub capacity: f64,
    pub arcs: Vec<Arc>,
    pub stations: Vec<StationSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Query {
    pub source: VertexId,
    pub target: VertexId,
    pub soc: f64,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

struct Fields<'a> {
    line: usize,
    it: std::str::SplitWhitespace<'a>,
}

impl<'a> Fields<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        self.it
            .next()
            .ok_or_else(|| err(self.line, format!("missing {what}")))
    }

    fn int<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let s = self.next(what)?;
        s.parse().map_err(|_| {
            err(
                self.line,
                format!("{what} {s:?} is not a nonnegative integer"),
            )
        })
    }

    fn num(&mut self, what: &str) -> Result<f64, ParseError> {
        let s = self.next(what)?;
        match s.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(err(
                self.line,
                format!("{what} {s:?} is not a finite number"),
            )),
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        match self.it.next() {
            None => Ok(()),
            Some(s) => Err(err(self.line, format!("unexpected trailing field {s:?}"))),
        }
    }
}

/// Nonempty, non-comment lines with their 1-based numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

impl Instance {
    /// Parses the text form. Syntax and counts are checked here, model
    /// constraints by [`Instance::to_graph`].
    pub fn parse(text: &str) -> Result<Instance, ParseError> {
        let mut lines = records(text);
        let (hl, header) = lines.next().ok_or_else(|| err(0, "empty instance"))?;
        let mut f = Fields {
            line: hl,
            it: header.split_whitespace(),
        };
        if f.next("header")? != "ev" {
            return Err(err(hl, "expected header `ev <n> <m> <k> <capacity>`"));
        }
        let n: usize = f.int("vertex count")?;
        let m: usize = f.int("arc count")?;
        let k: usize = f.int("station count")?;
        let capacity = f.num("capacity")?;
        f.end()?;
        let mut inst = Instance {
            n,
            capacity,
            arcs: Vec::with_capacity(m.min(1 << 24)),
            stations: Vec::new(),
        };
        let mut seen = std::collections::HashMap::new();
        for (ln, line) in lines {
            let mut f = Fields {
                line: ln,
                it: line.split_whitespace(),
            };
            match f.next("record type")? {
                "a" => {
                    if !inst.stations.is_empty() {
                        return Err(err(ln, "arc after station lines"));
                    }
                    let arc = Arc {
                        tail: f.int("tail")?,
                        head: f.int("head")?,
                        drive: f.num("drive time")?,
                        cons: f.num("consumption")?,
                    };
                    f.end()?;
                    inst.arcs.push(arc);
                }
                "s" => {
                    let vertex: VertexId = f.int("station vertex")?;
                    let spec = match f.next("init time or `type`")? {
                        "type" => {
                            let kind = f
                                .next("station type")?
                                .parse()
                                .map_err(|e: String| err(ln, e))?;
                            StationSpec::Typed { vertex, kind }
                        }
                        init => {
                            let init: f64 = init
                                .parse()
                                .ok()
                                .filter(|x: &f64| x.is_finite())
                                .ok_or_else(|| {
                                    err(ln, format!("init time {init:?} is not a finite number"))
                                })?;
                            match f.next("station kind")? {
                                "swap" => StationSpec::Swap { vertex, init },
                                "curve" => {
                                    let p: usize = f.int("breakpoint count")?;
                                    let mut points = Vec::with_capacity(p.min(1024));
                                    for _ in 0..p {
                                        points.push((
                                            f.num("breakpoint time")?,
                                            f.num("breakpoint SoC")?,
                                        ));
                                    }
                                    StationSpec::Curve {
                                        vertex,
                                        init,
                                        points,
                                    }
                                }
                                other => {
                                    return Err(err(ln, format!("unknown station kind {other:?}")))
                                }
                            }
                        }
                    };
                    f.end()?;
                    if let Some(first) = seen.insert(vertex, ln) {
                        return Err(err(
                            ln,
                            format!("duplicate station at vertex {vertex} (first on line {first})"),
                        ));
                    }
                    inst.stations.push(spec);
                }
                "ev" => return Err(err(ln, "second header")),
                other => return Err(err(ln, format!("unknown record type {other:?}"))),
            }
        }
        if inst.arcs.len() != m {
            return Err(err(
                0,
                format!("header announces {m} arcs, found {}", inst.arcs.len()),
            ));
        }
        if inst.stations.len() != k {
            return Err(err(
                0,
                format!(
                    "header announces {k} stations, found {}",
                    inst.stations.len()
                ),
            ));
        }
        Ok(inst)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "ev {} {} {} {:.6}",
            self.n,
            self.arcs.len(),
            self.stations.len(),
            self.capacity
        );
        for a in &self.arcs {
            let _ = writeln!(s, "a {} {} {:.6} {:.6}", a.tail, a.head, a.drive, a.cons);
        }
        for st in &self.stations {
            match st {
                StationSpec::Swap { vertex, init } => {
                    let _ = writeln!(s, "s {vertex} {init:.6} swap");
                }
                StationSpec::Curve {
                    vertex,
                    init,
                    points,
                } => {
                    let _ = write!(s, "s {vertex} {init:.6} curve {}", points.len());
                    for (t, b) in points {
                        let _ = write!(s, " {t:.6} {b:.6}");
                    }
                    s.push('\n');
                }
                StationSpec::Typed { vertex, kind } => {
                    let _ = writeln!(s, "s {vertex} type {kind}");
                }
            }
        }
        s
    }

    pub fn to_graph(&self) -> Result<Graph, ModelError> {
        let stations = self
            .stations
            .iter()
            .map(|st| {
                Ok(Station {
                    vertex: st.vertex(),
                    cf: st.charging_function(self.capacity)?,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        Graph::new(self.n, self.capacity, self.arcs.clone(), stations)
    }

    /// File form of a graph; stations are written as curves or swaps.
    pub fn from_graph(g: &Graph) -> Instance {
        Instance {
            n: g.num_vertices(),
            capacity: g.capacity(),
            arcs: g.arcs().to_vec(),
            stations: g
                .stations()
                .iter()
                .map(|s| match s.cf.kind() {
                    ChargingKind::Swap => StationSpec::Swap {
                        vertex: s.vertex,
                        init: s.cf.init_time(),
                    },
                    ChargingKind::Curve => StationSpec::Curve {
                        vertex: s.vertex,
                        init: s.cf.init_time(),
                        points: s.cf.points().to_vec(),
                    },
                })
                .collect(),
        }
    }

    pub fn vehicle(&self) -> VehicleParams {
        VehicleParams {
            capacity: self.capacity,
        }
    }
}

/// Parses and validates an instance.
pub fn parse_instance(text: &str) -> Result<(Graph, VehicleParams), InstanceError> {
    let inst = Instance::parse(text)?;
    Ok((inst.to_graph()?, inst.vehicle()))
}

/// Parses `q <s> <t> <soc>` lines, checking vertices against `n` and SoC
/// against `[0, capacity]`.
pub fn parse_queries(text: &str, n: usize, capacity: f64) -> Result<Vec<Query>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in records(text) {
        let mut f = Fields {
            line: ln,
            it: line.split_whitespace(),
        };
        if f.next("record type")? != "q" {
            return Err(err(ln, "expected `q <s> <t> <soc>`"));
        }
        let q = Query {
            source: f.int("source")?,
            target: f.int("target")?,
            soc: f.num("SoC")?,
        };
        f.end()?;
        for v in [q.source, q.target] {
            if v as usize >= n {
                return Err(err(ln, format!("vertex {v} out of range (n = {n})")));
            }
        }
        if !(0.0..=capacity).contains(&q.soc) {
            return Err(err(ln, format!("SoC {} outside [0, {capacity}]", q.soc)));
        }
        out.push(q);
    }
    Ok(out)
}

pub fn render_queries(queries: &[Query]) -> String {
    let mut s = String::new();
    for q in queries {
        let _ = writeln!(s, "q {} {} {:.6}", q.source, q.target, q.soc);
    }
    s
}
