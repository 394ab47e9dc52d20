//! Plain search against the overlay engine under each exact potential.

use crate::args::ExperimentArgs;
use crate::commands::{output, run_batch, CliError, Solver, Status};
use evr_ch::{preprocess, ChConfig, Overlay};
use evr_charge::{Mode, PotentialKind};
use evr_io::{generate_synthetic, random_queries, GenParams, Instance, Query, Scenario};
use evr_model::Graph;
use serde::Serialize;
use std::io::Write;
use std::time::Instant;

pub const EXPERIMENT_SCHEMA: &str = "evr-experiment/1";

/// Largest accepted trip time difference between methods, in seconds.
pub const AGREEMENT_TOL: f64 = 1e-9;

pub const METHODS: [&str; 4] = ["plain", "omega", "pi", "pi-demand"];
const POTENTIALS: [PotentialKind; 3] = [
    PotentialKind::Omega,
    PotentialKind::Pi,
    PotentialKind::PiOnDemand,
];

/// Results of one query under every method, in [`METHODS`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub query: Query,
    pub trip_time: [Option<f64>; 4],
    pub labels_settled: [u64; 4],
    pub runtime_ms: [f64; 4],
    /// Charging stops on the plain search's route.
    pub stops: usize,
}

impl Comparison {
    /// Largest pairwise trip time difference; infinite when feasibility disagrees.
    pub fn max_diff(&self) -> f64 {
        let first = self.trip_time[0];
        self.trip_time[1..]
            .iter()
            .map(|t| match (first, *t) {
                (Some(a), Some(b)) => (a - b).abs(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    pub fn agrees(&self) -> bool {
        self.max_diff() <= AGREEMENT_TOL
    }
}

/// Runs `queries` with the plain search on `g` and the engine on `ov`.
pub fn compare(
    g: &Graph,
    ov: &Overlay,
    queries: &[Query],
    threads: Option<usize>,
) -> Result<Vec<Comparison>, CliError> {
    let mut runs = vec![run_batch(&Solver::Plain(g), queries, threads)?];
    for p in POTENTIALS {
        runs.push(run_batch(
            &Solver::charge(ov, Mode::Exact, p)?,
            queries,
            threads,
        )?);
    }
    Ok(queries
        .iter()
        .enumerate()
        .map(|(i, q)| Comparison {
            query: *q,
            trip_time: std::array::from_fn(|m| {
                runs[m][i].itinerary.as_ref().map(|it| it.trip_time)
            }),
            labels_settled: std::array::from_fn(|m| runs[m][i].stats.labels_settled),
            runtime_ms: std::array::from_fn(|m| runs[m][i].millis),
            stops: runs[0][i].itinerary.as_ref().map_or(0, |it| it.stops.len()),
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub queries: usize,
    pub feasible: usize,
    /// Feasible queries whose route charges at least once.
    pub charging: usize,
    pub mismatches: usize,
    pub max_diff_s: f64,
    /// Median labels settled per method, in [`METHODS`] order.
    pub median_labels: [f64; 4],
    pub median_runtime_ms: [f64; 4],
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub schema: &'static str,
    pub vertices: usize,
    pub arcs: usize,
    pub stations: usize,
    pub core_size: usize,
    pub preprocess_s: f64,
    pub scenarios: Vec<ScenarioSummary>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

pub fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::Bss => "bss",
        Scenario::Mixed => "mixed",
        Scenario::Realistic => "realistic",
    }
}

pub fn summarize(scenario: Scenario, rows: &[Comparison]) -> ScenarioSummary {
    ScenarioSummary {
        scenario: scenario_name(scenario).into(),
        queries: rows.len(),
        feasible: rows.iter().filter(|r| r.trip_time[0].is_some()).count(),
        charging: rows.iter().filter(|r| r.stops > 0).count(),
        mismatches: rows.iter().filter(|r| !r.agrees()).count(),
        max_diff_s: rows.iter().map(Comparison::max_diff).fold(0.0, f64::max),
        median_labels: std::array::from_fn(|m| {
            median(rows.iter().map(|r| r.labels_settled[m] as f64).collect())
        }),
        median_runtime_ms: std::array::from_fn(|m| {
            median(rows.iter().map(|r| r.runtime_ms[m]).collect())
        }),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or("INFEASIBLE".into(), |t| format!("{t:.9}"))
}

pub fn csv_header() -> String {
    let mut s = format!("# {EXPERIMENT_SCHEMA}\nscenario,index,source,target,soc_wh");
    for m in METHODS {
        s += &format!(",{m}_trip_time_s,{m}_labels");
    }
    s + ",plain_stops,max_diff_s\n"
}

pub fn csv_rows(scenario: Scenario, rows: &[Comparison]) -> String {
    let mut s = String::new();
    for (i, r) in rows.iter().enumerate() {
        s += &format!(
            "{},{i},{},{},{}",
            scenario_name(scenario),
            r.query.source,
            r.query.target,
            r.query.soc
        );
        for m in 0..4 {
            s += &format!(",{},{}", opt(r.trip_time[m]), r.labels_settled[m]);
        }
        s += &format!(",{},{:e}\n", r.stops, r.max_diff());
    }
    s
}

pub fn cmd_experiment(a: &ExperimentArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    if a.n < 2 || !(a.capacity > 0.0) || !(a.core_degree > 0.0) {
        return Err(CliError::Usage(
            "--n must be at least 2; capacity and core degree positive".into(),
        ));
    }
    let soc = a.soc.unwrap_or(a.capacity);
    if !(0.0..=a.capacity).contains(&soc) {
        return Err(CliError::Usage(format!(
            "--soc {soc} outside [0, {}]",
            a.capacity
        )));
    }
    let base: Instance = generate_synthetic(&GenParams {
        n: a.n,
        capacity: a.capacity,
        seed: a.seed,
        ..GenParams::default()
    });
    let g0 = base.to_graph().map_err(|e| CliError::Io(e.to_string()))?;
    let start = Instant::now();
    // Exact overlays do not depend on charging functions, so one contraction
    // serves every scenario.
    let ov0 = preprocess(
        &g0,
        ChConfig {
            core_degree: a.core_degree,
            ..ChConfig::default()
        },
    );
    let preprocess_s = start.elapsed().as_secs_f64();
    let queries = random_queries(a.n, a.queries, soc, a.seed ^ 0x51ed_270b);
    let mut csv = csv_header();
    let mut summary = ExperimentSummary {
        schema: EXPERIMENT_SCHEMA,
        vertices: g0.num_vertices(),
        arcs: g0.num_arcs(),
        stations: g0.stations().len(),
        core_size: ov0.core_size(),
        preprocess_s,
        scenarios: Vec::new(),
    };
    for &sc in &a.scenario {
        let sc: Scenario = sc.into();
        let g = base
            .with_scenario(sc, a.seed)
            .to_graph()
            .map_err(|e| CliError::Io(e.to_string()))?;
        let ov = ov0.rebind(&g).map_err(|e| CliError::Io(e.to_string()))?;
        let rows = compare(&g, &ov, &queries, a.threads)?;
        csv += &csv_rows(sc, &rows);
        summary.scenarios.push(summarize(sc, &rows));
    }
    let mut w = output(a.out.as_deref())?;
    w.write_all(csv.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Io(e.to_string()))?;
    drop(w);
    if a.out.is_some() {
        let line = serde_json::to_string(&summary).expect("summary serializes") + "\n";
        stdout
            .write_all(line.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?;
    } else {
        eprintln!(
            "{}",
            serde_json::to_string(&summary).expect("summary serializes")
        );
    }
    let bad: usize = summary.scenarios.iter().map(|s| s.mismatches).sum();
    if bad > 0 {
        return Err(CliError::Validation(format!(
            "{bad} queries disagree by more than {AGREEMENT_TOL} s"
        )));
    }
    Ok(Status::Ok)
}
