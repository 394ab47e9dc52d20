use crate::dp::{grid_dp_query, DpError, DEFAULT_STATE_CAP};
use evr_cfp::{cfp_query, verify_itinerary, Config, Itinerary, SearchError};
use evr_io::{render_queries, Instance, Query};
use evr_model::{ChargingKind, Graph, Station, ZeroPotential};
use serde::Serialize;
use std::fmt::Write as _;
use thiserror::Error;

/// Version tag embedded in every serialized report.
pub const SCHEMA: &str = "evr-validate/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidateError {
    #[error("reference solver: {0}")]
    Dp(#[from] DpError),
    #[error("search: {0}")]
    Search(#[from] SearchError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// The search reports a longer trip, or infeasibility, where the grid
    /// policy finds a feasible trip.
    CfpAboveDp,
    /// The grid result exceeds the search result by more than the tolerance.
    GapExceedsTolerance,
    /// The search finds a trip the grid policy cannot reproduce at a fine grid.
    FeasibilityMismatch,
    /// The returned itinerary does not replay to its claimed trip time.
    ItineraryInvalid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryCheck {
    pub index: usize,
    pub source: u32,
    pub target: u32,
    pub soc: f64,
    pub cfp: Option<f64>,
    pub dp: Option<f64>,
    pub cfp_stops: usize,
    pub dp_stops: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub query: usize,
    pub kind: ViolationKind,
    pub detail: String,
    /// Instance text and query line of a reduced instance that still fails.
    pub counterexample: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub schema: &'static str,
    pub delta: f64,
    pub tolerance: f64,
    pub max_stops: usize,
    pub min_rate: f64,
    pub queries: Vec<QueryCheck>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Largest `dp - cfp` over queries where both are feasible.
    pub fn max_gap(&self) -> f64 {
        self.queries
            .iter()
            .filter_map(|q| Some(q.dp? - q.cfp?))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let feasible = self.queries.iter().filter(|q| q.cfp.is_some()).count();
        let mut s = format!(
            "{} queries ({} feasible), delta {}, tolerance {:.6}, max gap {:.6}: {}\n",
            self.queries.len(),
            feasible,
            self.delta,
            self.tolerance,
            self.max_gap(),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        for v in &self.violations {
            let _ = writeln!(s, "  query {}: {:?}: {}", v.query, v.kind, v.detail);
        }
        s
    }
}

/// Smallest positive charging rate over curve stations; `+inf` without any.
fn min_rate(g: &Graph) -> f64 {
    g.stations()
        .iter()
        .filter(|st| st.cf.kind() == ChargingKind::Curve)
        .map(|st| st.cf.min_rate())
        .fold(f64::INFINITY, f64::min)
}

/// Allowed excess of the grid result: every stop may overshoot its optimal
/// departure SoC by less than one grid step, charged at the slowest rate.
pub fn tolerance(g: &Graph, max_stops: usize, delta: f64) -> f64 {
    let r = min_rate(g);
    if r.is_infinite() {
        0.0
    } else {
        (max_stops + 1) as f64 * delta / r
    }
}

struct Outcomes {
    cfp: Option<Itinerary>,
    dp: Option<f64>,
    dp_stops: usize,
}

fn solve(g: &Graph, q: &Query, delta: f64) -> Result<Outcomes, ValidateError> {
    let out = cfp_query(
        g,
        g,
        &mut ZeroPotential,
        q.source,
        q.target,
        q.soc,
        Config::default(),
    )?;
    let cfp = out.route.map(|r| Itinerary::from_route(g, q.source, &r));
    let dp = grid_dp_query(g, q.source, q.target, q.soc, delta, DEFAULT_STATE_CAP)?;
    Ok(Outcomes {
        cfp,
        dp: dp.trip_time,
        dp_stops: dp.stops,
    })
}

fn violations(
    g: &Graph,
    q: &Query,
    o: &Outcomes,
    delta: f64,
    tol: f64,
) -> Vec<(ViolationKind, String)> {
    let mut v = Vec::new();
    let fine = delta <= 0.01 * g.capacity();
    match (&o.cfp, o.dp) {
        (Some(it), Some(dp)) => {
            if it.trip_time > dp + 1e-9 {
                v.push((
                    ViolationKind::CfpAboveDp,
                    format!("search {} > grid {}", it.trip_time, dp),
                ));
            }
            // Same 1e-9 summation-order allowance as the check above.
            if dp - it.trip_time > tol + 1e-9 {
                v.push((
                    ViolationKind::GapExceedsTolerance,
                    format!("grid {} - search {} > {}", dp, it.trip_time, tol),
                ));
            }
        }
        (None, Some(dp)) => v.push((
            ViolationKind::CfpAboveDp,
            format!("search infeasible, grid {dp}"),
        )),
        (Some(it), None) if fine => v.push((
            ViolationKind::FeasibilityMismatch,
            format!("search {}, grid infeasible", it.trip_time),
        )),
        _ => {}
    }
    if let Some(it) = &o.cfp {
        match verify_itinerary(g, it, q.soc) {
            Ok(sim) if (sim - it.trip_time).abs() <= 1e-6 * it.trip_time.max(1.0) => {}
            Ok(sim) => v.push((
                ViolationKind::ItineraryInvalid,
                format!("replays to {sim}, claims {}", it.trip_time),
            )),
            Err(e) => v.push((ViolationKind::ItineraryInvalid, e.to_string())),
        }
    }
    v
}

fn rebuild(g: &Graph, arcs: &[bool], stations: &[bool]) -> Graph {
    let a = g
        .arcs()
        .iter()
        .zip(arcs)
        .filter(|p| *p.1)
        .map(|p| *p.0)
        .collect();
    let s: Vec<Station> = g
        .stations()
        .iter()
        .zip(stations)
        .filter(|p| *p.1)
        .map(|p| p.0.clone())
        .collect();
    Graph::new(g.num_vertices(), g.capacity(), a, s).expect("subgraphs of a valid graph are valid")
}

/// Greedily drops arcs, then stations, while `fails` still holds.
pub fn minimize_counterexample(g: &Graph, fails: impl Fn(&Graph) -> bool) -> Graph {
    let mut arcs = vec![true; g.num_arcs()];
    let mut stations = vec![true; g.stations().len()];
    for i in 0..arcs.len() {
        arcs[i] = false;
        if !fails(&rebuild(g, &arcs, &stations)) {
            arcs[i] = true;
        }
    }
    for i in 0..stations.len() {
        stations[i] = false;
        if !fails(&rebuild(g, &arcs, &stations)) {
            stations[i] = true;
        }
    }
    rebuild(g, &arcs, &stations)
}

/// Runs the search and the grid reference on every query and checks
/// admissibility, the gap bound, feasibility agreement and itinerary replay.
pub fn validate_instance(
    g: &Graph,
    queries: &[Query],
    delta: f64,
) -> Result<ValidationReport, ValidateError> {
    let outcomes = queries
        .iter()
        .map(|q| solve(g, q, delta))
        .collect::<Result<Vec<_>, _>>()?;
    let max_stops = outcomes
        .iter()
        .map(|o| {
            o.dp_stops
                .max(o.cfp.as_ref().map_or(0, |it| it.stops.len()))
        })
        .max()
        .unwrap_or(0);
    let tol = tolerance(g, max_stops, delta);
    let mut report = ValidationReport {
        schema: SCHEMA,
        delta,
        tolerance: tol,
        max_stops,
        min_rate: min_rate(g),
        queries: Vec::with_capacity(queries.len()),
        violations: Vec::new(),
    };
    for (index, (q, o)) in queries.iter().zip(&outcomes).enumerate() {
        report.queries.push(QueryCheck {
            index,
            source: q.source,
            target: q.target,
            soc: q.soc,
            cfp: o.cfp.as_ref().map(|it| it.trip_time),
            dp: o.dp,
            cfp_stops: o.cfp.as_ref().map_or(0, |it| it.stops.len()),
            dp_stops: o.dp_stops,
        });
        for (kind, detail) in violations(g, q, o, delta, tol) {
            let small = minimize_counterexample(g, |h| {
                solve(h, q, delta)
                    .is_ok_and(|o| violations(h, q, &o, delta, tol).iter().any(|v| v.0 == kind))
            });
            let counterexample =
                Instance::from_graph(&small).render() + &render_queries(std::slice::from_ref(q));
            report.violations.push(Violation {
                query: index,
                kind,
                detail,
                counterexample,
            });
        }
    }
    Ok(report)
}
