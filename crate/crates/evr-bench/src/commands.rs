use crate::args::*;
use evr_cfp::{cfp_query, Config, Itinerary, Stats};
use evr_ch::{preprocess, ChConfig, Overlay};
use evr_charge::{Engine, Mode, PotentialKind, QueryPlan, QueryReport};
use evr_io::{
    generate_rank_queries, generate_synthetic, parse_queries, random_queries, render_queries,
    GenParams, Instance, Query,
};
use evr_model::{Graph, ZeroPotential};
use evr_oracle::{validate_instance, ValidationReport};
use rayon::prelude::*;
use serde::Serialize;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const INSTANCE_SCHEMA: &str = "evr-instance/1";
pub const QUERIES_SCHEMA: &str = "evr-queries/1";
pub const PREPROCESS_SCHEMA: &str = "evr-preprocess/1";
pub const QUERY_SCHEMA: &str = "evr-query/1";
pub const RANK_SCHEMA: &str = "evr-rank/1";
pub const VALIDATE_SCHEMA: &str = "evr-validate-dir/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 3,
            CliError::Validation(_) => 2,
        }
    }
}

/// Successful outcomes; [`Status::InfeasibleOnly`] exits with 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    InfeasibleOnly,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

pub fn load_instance(path: &Path) -> Result<(Instance, Graph), CliError> {
    let inst = Instance::parse(&read_text(path)?).map_err(|e| io_err(path, e))?;
    let g = inst.to_graph().map_err(|e| io_err(path, e))?;
    Ok((inst, g))
}

pub fn load_overlay(path: &Path, g: &Graph) -> Result<Overlay, CliError> {
    let f = fs::File::open(path).map_err(|e| io_err(path, e))?;
    Overlay::read_binary(io::BufReader::new(f), g).map_err(|e| io_err(path, e))
}

/// Standard output or a buffered file.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        None => Box::new(BufWriter::new(io::stdout().lock())),
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).map_err(|e| io_err(p, e))?,
        )),
    })
}

fn write_all(w: &mut dyn Write, s: &str, what: &str) -> Result<(), CliError> {
    w.write_all(s.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Io(format!("{what}: {e}")))
}

/// Instance text with its schema line.
pub fn instance_text(inst: &Instance) -> String {
    format!("# {INSTANCE_SCHEMA}\n{}", inst.render())
}

pub fn queries_text(qs: &[Query]) -> String {
    format!("# {QUERIES_SCHEMA}\n{}", render_queries(qs))
}

pub fn generate(a: &GenerateArgs) -> Result<Status, CliError> {
    if a.n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    if !(a.capacity > 0.0)
        || !(0.0..=1.0).contains(&a.station_fraction)
        || !(a.avg_degree > 0.0)
        || !(a.roughness >= 0.0)
    {
        return Err(CliError::Usage(
            "capacity, degree and roughness must be positive; station fraction in [0, 1]".into(),
        ));
    }
    let soc = a.soc.unwrap_or(a.capacity);
    if !(0.0..=a.capacity).contains(&soc) {
        return Err(CliError::Usage(format!(
            "--soc {soc} outside [0, {}]",
            a.capacity
        )));
    }
    let inst = generate_synthetic(&GenParams {
        n: a.n,
        avg_degree: a.avg_degree,
        station_fraction: a.station_fraction,
        roughness: a.roughness,
        capacity: a.capacity,
        scenario: a.scenario.into(),
        seed: a.seed,
    });
    write_all(
        &mut *output(Some(&a.out))?,
        &instance_text(&inst),
        "instance",
    )?;
    if let Some(p) = &a.queries_out {
        let qs = random_queries(a.n, a.queries, soc, a.seed ^ 0x9e37_79b9);
        write_all(&mut *output(Some(p))?, &queries_text(&qs), "queries")?;
    }
    Ok(Status::Ok)
}

#[derive(Clone, Debug, Serialize)]
pub struct PreprocessSummary {
    pub schema: &'static str,
    pub vertices: usize,
    pub core_size: usize,
    pub core_share: f64,
    pub shortcuts: usize,
    pub core_average_degree: f64,
    pub aggressive: bool,
    pub elapsed_s: f64,
}

pub fn summarize(ov: &Overlay, elapsed_s: f64) -> PreprocessSummary {
    PreprocessSummary {
        schema: PREPROCESS_SCHEMA,
        vertices: ov.num_vertices(),
        core_size: ov.core_size(),
        core_share: ov.core_size() as f64 / ov.num_vertices().max(1) as f64,
        shortcuts: ov.num_shortcuts(),
        core_average_degree: ov.core_average_degree(),
        aggressive: ov.is_aggressive(),
        elapsed_s,
    }
}

pub fn cmd_preprocess(a: &PreprocessArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    if !(a.core_degree > 0.0) {
        return Err(CliError::Usage("--core-degree must be positive".into()));
    }
    let (_, g) = load_instance(&a.instance)?;
    let start = Instant::now();
    let ov = preprocess(
        &g,
        ChConfig {
            core_degree: a.core_degree,
            aggressive: a.aggressive,
            ..ChConfig::default()
        },
    );
    let elapsed = start.elapsed().as_secs_f64();
    let mut w = output(Some(&a.out))?;
    ov.write_binary(&mut w).map_err(|e| io_err(&a.out, e))?;
    let line = serde_json::to_string(&summarize(&ov, elapsed)).expect("summary serializes") + "\n";
    write_all(stdout, &line, "stdout")?;
    Ok(Status::Ok)
}

/// The plain search or a query engine with fixed mode and potential.
pub enum Solver<'a> {
    Plain(&'a Graph),
    Charge {
        engine: Engine<'a>,
        mode: Mode,
        potential: PotentialKind,
    },
}

impl<'a> Solver<'a> {
    pub fn charge(
        overlay: &'a Overlay,
        mode: Mode,
        potential: PotentialKind,
    ) -> Result<Self, CliError> {
        let engine = Engine::new(overlay);
        engine
            .check(mode)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Solver::Charge {
            engine,
            mode,
            potential,
        })
    }

    pub fn solve(&self, q: &Query) -> Result<(Option<Itinerary>, Stats), CliError> {
        match self {
            Solver::Plain(g) => {
                let out = cfp_query(
                    g,
                    *g,
                    &mut ZeroPotential,
                    q.source,
                    q.target,
                    q.soc,
                    Config::default(),
                )
                .map_err(|e| CliError::Usage(e.to_string()))?;
                Ok((
                    out.route.map(|r| Itinerary::from_route(g, q.source, &r)),
                    out.stats,
                ))
            }
            Solver::Charge {
                engine,
                mode,
                potential,
            } => {
                let plan = QueryPlan {
                    source: q.source,
                    target: q.target,
                    soc: q.soc,
                    potential: *potential,
                    mode: *mode,
                };
                let r = engine
                    .query(&plan)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                Ok((r.itinerary, r.stats))
            }
        }
    }

    pub fn names(&self) -> (&'static str, String, &'static str) {
        match self {
            Solver::Plain(_) => ("plain", "exact".into(), "zero"),
            Solver::Charge {
                mode, potential, ..
            } => ("charge", mode.to_string(), potential_name(*potential)),
        }
    }
}

pub fn potential_name(p: PotentialKind) -> &'static str {
    match p {
        PotentialKind::Zero => "zero",
        PotentialKind::Omega => "omega",
        PotentialKind::Pi => "pi",
        PotentialKind::PiOnDemand => "pi-demand",
    }
}

/// One solved query with its wall-clock time in milliseconds.
pub struct Solved {
    pub itinerary: Option<Itinerary>,
    pub stats: Stats,
    pub millis: f64,
}

/// Solves `queries` on `threads` workers (all cores when `None`); results
/// keep the input order.
pub fn run_batch(
    solver: &Solver,
    queries: &[Query],
    threads: Option<usize>,
) -> Result<Vec<Solved>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| {
        queries
            .par_iter()
            .map(|q| {
                let start = Instant::now();
                let (itinerary, stats) = solver.solve(q)?;
                Ok(Solved {
                    itinerary,
                    stats,
                    millis: start.elapsed().as_secs_f64() * 1e3,
                })
            })
            .collect()
    })
}

#[derive(Serialize)]
struct QueryLine<'a> {
    schema: &'static str,
    index: usize,
    source: u32,
    target: u32,
    soc_wh: f64,
    engine: &'static str,
    mode: &'a str,
    potential: &'static str,
    #[serde(flatten)]
    report: QueryReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<f64>,
}

pub fn cmd_query(a: &QueryArgs) -> Result<Status, CliError> {
    let (_, g) = load_instance(&a.instance)?;
    let queries = parse_queries(&read_text(&a.queries)?, g.num_vertices(), g.capacity())
        .map_err(|e| io_err(&a.queries, e))?;
    let overlay = a
        .overlay
        .as_ref()
        .map(|p| load_overlay(p, &g))
        .transpose()?;
    let solver = match &overlay {
        None => {
            if a.mode != ModeArg::Exact || a.potential.is_some_and(|p| p != PotentialArg::Zero) {
                return Err(CliError::Usage(
                    "heuristic modes and potentials need --overlay".into(),
                ));
            }
            Solver::Plain(&g)
        }
        Some(ov) => Solver::charge(
            ov,
            a.mode.into(),
            a.potential.unwrap_or(PotentialArg::Pi).into(),
        )?,
    };
    let solved = run_batch(&solver, &queries, a.threads)?;
    let (engine, mode, potential) = solver.names();
    let mut text = String::new();
    for (index, (q, s)) in queries.iter().zip(&solved).enumerate() {
        let line = QueryLine {
            schema: QUERY_SCHEMA,
            index,
            source: q.source,
            target: q.target,
            soc_wh: q.soc,
            engine,
            mode: &mode,
            potential,
            report: QueryReport::new(s.itinerary.as_ref(), &s.stats),
            runtime_ms: a.timing.then_some(s.millis),
        };
        text += &serde_json::to_string(&line).expect("query line serializes");
        text.push('\n');
    }
    write_all(&mut *output(a.out.as_deref())?, &text, "query output")?;
    let feasible = solved.iter().any(|s| s.itinerary.is_some());
    Ok(if feasible || queries.is_empty() {
        Status::Ok
    } else {
        Status::InfeasibleOnly
    })
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "NA".into()
    } else {
        format!("{x:.6}")
    }
}

/// One CSV row per rank exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct RankRow {
    pub rank_log: u32,
    pub queries: usize,
    pub feasible: usize,
    pub median_runtime_ms: f64,
    pub median_trip_time_s: f64,
    pub mean_drive_time_s: f64,
    pub mean_charge_time_s: f64,
    pub median_labels_settled: f64,
}

pub fn rank_rows(solver: &Solver, g: &Graph, a: &RankArgs) -> Result<Vec<RankRow>, CliError> {
    let soc = a.soc.unwrap_or(g.capacity());
    if !(0.0..=g.capacity()).contains(&soc) {
        return Err(CliError::Usage(format!(
            "--soc {soc} outside [0, {}]",
            g.capacity()
        )));
    }
    let rq = generate_rank_queries(g, a.seed, a.max_rank, a.sources, soc)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let queries: Vec<Query> = rq
        .iter()
        .map(|q| Query {
            source: q.source,
            target: q.target,
            soc: q.soc,
        })
        .collect();
    let solved = run_batch(solver, &queries, a.threads)?;
    Ok((0..=a.max_rank)
        .map(|k| {
            let of_rank: Vec<&Solved> = rq
                .iter()
                .zip(&solved)
                .filter(|(q, _)| q.rank_log == k)
                .map(|p| p.1)
                .collect();
            let its: Vec<&Itinerary> = of_rank
                .iter()
                .filter_map(|s| s.itinerary.as_ref())
                .collect();
            RankRow {
                rank_log: k,
                queries: of_rank.len(),
                feasible: its.len(),
                median_runtime_ms: median(
                    &mut of_rank.iter().map(|s| s.millis).collect::<Vec<_>>(),
                ),
                median_trip_time_s: median(
                    &mut its.iter().map(|it| it.trip_time).collect::<Vec<_>>(),
                ),
                mean_drive_time_s: mean(&its.iter().map(|it| it.drive_time).collect::<Vec<_>>()),
                mean_charge_time_s: mean(&its.iter().map(|it| it.charge_time).collect::<Vec<_>>()),
                median_labels_settled: median(
                    &mut of_rank
                        .iter()
                        .map(|s| s.stats.labels_settled as f64)
                        .collect::<Vec<_>>(),
                ),
            }
        })
        .collect())
}

pub fn rank_csv(rows: &[RankRow], timing: bool) -> String {
    let mut s = format!(
        "# {RANK_SCHEMA}\nrank_log,rank,queries,feasible,median_runtime_ms,median_trip_time_s,mean_drive_time_s,mean_charge_time_s,median_labels_settled\n"
    );
    for r in rows {
        s += &format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.rank_log,
            1u64 << r.rank_log,
            r.queries,
            r.feasible,
            if timing {
                num(r.median_runtime_ms)
            } else {
                "NA".into()
            },
            num(r.median_trip_time_s),
            num(r.mean_drive_time_s),
            num(r.mean_charge_time_s),
            num(r.median_labels_settled),
        );
    }
    s
}

pub fn cmd_rank(a: &RankArgs) -> Result<Status, CliError> {
    let (_, g) = load_instance(&a.instance)?;
    let ov = load_overlay(&a.overlay, &g)?;
    let solver = Solver::charge(&ov, a.mode.into(), a.potential.into())?;
    let rows = rank_rows(&solver, &g, a)?;
    write_all(
        &mut *output(a.out.as_deref())?,
        &rank_csv(&rows, !a.no_timing),
        "rank output",
    )?;
    Ok(Status::Ok)
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceValidation {
    pub name: String,
    pub passed: bool,
    /// Names of the failed checks.
    pub failed: Vec<String>,
    pub messages: Vec<String>,
    pub report: Option<ValidationReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DirValidation {
    pub schema: &'static str,
    pub instances: Vec<InstanceValidation>,
}

impl DirValidation {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(|i| i.passed)
    }
}

/// Recorded results: lines `<index> <trip_time_s>` or `<index> INFEASIBLE`.
fn parse_expected(text: &str) -> Result<Vec<(usize, Option<f64>)>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut f = l.split_whitespace();
            let i = f
                .next()
                .and_then(|x| x.parse().ok())
                .ok_or(format!("bad line {l:?}"))?;
            let v = match f.next() {
                Some("INFEASIBLE") => None,
                Some(x) => Some(x.parse::<f64>().map_err(|_| format!("bad line {l:?}"))?),
                None => return Err(format!("bad line {l:?}")),
            };
            Ok((i, v))
        })
        .collect()
}

pub fn expected_text(report: &ValidationReport) -> String {
    let mut s = String::from("# evr-expected/1\n");
    for q in &report.queries {
        match q.cfp {
            Some(t) => s += &format!("{} {t:.9}\n", q.index),
            None => s += &format!("{} INFEASIBLE\n", q.index),
        }
    }
    s
}

fn validate_one(ev: &Path, delta: Option<f64>) -> InstanceValidation {
    let name = ev
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut out = InstanceValidation {
        name,
        passed: false,
        failed: Vec::new(),
        messages: Vec::new(),
        report: None,
    };
    let fail = |out: &mut InstanceValidation, check: &str, msg: String| {
        out.failed.push(check.to_string());
        out.messages.push(format!("{check}: {msg}"));
    };
    let inst = match fs::read_to_string(ev)
        .map_err(|e| e.to_string())
        .and_then(|t| Instance::parse(&t).map_err(|e| e.to_string()))
    {
        Ok(i) => i,
        Err(e) => {
            fail(&mut out, "instance-parses", e);
            return out;
        }
    };
    let g = match inst.to_graph() {
        Ok(g) => g,
        Err(e) => {
            fail(&mut out, "instance-valid", e.to_string());
            return out;
        }
    };
    let qpath = ev.with_extension("q");
    let queries = match fs::read_to_string(&qpath)
        .map_err(|e| e.to_string())
        .and_then(|t| parse_queries(&t, g.num_vertices(), g.capacity()).map_err(|e| e.to_string()))
    {
        Ok(q) => q,
        Err(e) => {
            fail(
                &mut out,
                "queries-parse",
                format!("{}: {e}", qpath.display()),
            );
            return out;
        }
    };
    let delta = delta.unwrap_or(g.capacity() / 400.0);
    let report = match validate_instance(&g, &queries, delta) {
        Ok(r) => r,
        Err(e) => {
            fail(&mut out, "reference-runs", e.to_string());
            return out;
        }
    };
    for v in &report.violations {
        let kind = serde_json::to_value(v.kind).expect("kind serializes");
        fail(
            &mut out,
            kind.as_str().unwrap_or("violation"),
            format!("query {}: {}", v.query, v.detail),
        );
    }
    let epath = ev.with_extension("expected");
    if let Ok(text) = fs::read_to_string(&epath) {
        match parse_expected(&text) {
            Err(e) => fail(&mut out, "recorded-results-parse", e),
            Ok(rec) => {
                for (i, want) in rec {
                    let got = report.queries.get(i).and_then(|q| q.cfp);
                    let ok = match (want, got) {
                        (Some(w), Some(g)) => (w - g).abs() <= 1e-6 * w.abs().max(1.0),
                        (None, None) => report.queries.len() > i,
                        _ => false,
                    };
                    if !ok {
                        fail(
                            &mut out,
                            "recorded-result",
                            format!("query {i}: recorded {want:?}, computed {got:?}"),
                        );
                    }
                }
            }
        }
    }
    out.passed = out.failed.is_empty();
    out.report = Some(report);
    out
}

pub fn validate_dir(dir: &Path, delta: Option<f64>) -> Result<DirValidation, CliError> {
    let mut evs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ev"))
        .collect();
    if evs.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: no .ev instances",
            dir.display()
        )));
    }
    if let Some(d) = delta {
        if !(d > 0.0 && d.is_finite()) {
            return Err(CliError::Usage(format!(
                "--delta must be positive, got {d}"
            )));
        }
    }
    evs.sort();
    Ok(DirValidation {
        schema: VALIDATE_SCHEMA,
        instances: evs.iter().map(|p| validate_one(p, delta)).collect(),
    })
}

pub fn cmd_validate(a: &ValidateArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let res = validate_dir(&a.dir, a.delta)?;
    let mut summary = String::new();
    for i in &res.instances {
        let detail = i.report.as_ref().map(|r| r.summary()).unwrap_or_default();
        summary += &format!(
            "{}: {} {}",
            i.name,
            if i.passed { "PASS" } else { "FAIL" },
            detail
        );
        if detail.is_empty() {
            summary.push('\n');
        }
        for m in &i.messages {
            summary += &format!("  {m}\n");
        }
    }
    write_all(stdout, &summary, "stdout")?;
    if let Some(p) = &a.out {
        let json = serde_json::to_string_pretty(&res).expect("report serializes") + "\n";
        write_all(&mut *output(Some(p))?, &json, "report")?;
    }
    if res.passed() {
        Ok(Status::Ok)
    } else {
        let bad: Vec<&str> = res
            .instances
            .iter()
            .filter(|i| !i.passed)
            .map(|i| i.name.as_str())
            .collect();
        Err(CliError::Validation(bad.join(", ")))
    }
}
