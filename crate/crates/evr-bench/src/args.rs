use clap::{Args, Parser, Subcommand, ValueEnum};
use evr_charge::{Mode, PotentialKind};
use evr_io::Scenario;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(
    name = "evroute",
    version,
    about = "Electric-vehicle routing with charging stops"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Write a synthetic instance and, optionally, random queries.
    Generate(GenerateArgs),
    /// Contract an instance into an overlay file.
    Preprocess(PreprocessArgs),
    /// Answer a query file; one JSON object per line.
    Query(QueryArgs),
    /// Dijkstra-rank queries aggregated per rank as CSV.
    Rank(RankArgs),
    /// Cross-check a directory of small instances against the grid reference.
    Validate(ValidateArgs),
    /// Plain search against every exact potential on each scenario.
    Experiment(ExperimentArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Exact,
    HeuPi,
    HeuOmega,
    HeuOmegaAggr,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::HeuPi => Mode::HeuPi,
            ModeArg::HeuOmega => Mode::HeuOmega,
            ModeArg::HeuOmegaAggr => Mode::HeuOmegaAggressive,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialArg {
    Zero,
    Omega,
    Pi,
    PiDemand,
}

impl From<PotentialArg> for PotentialKind {
    fn from(p: PotentialArg) -> PotentialKind {
        match p {
            PotentialArg::Zero => PotentialKind::Zero,
            PotentialArg::Omega => PotentialKind::Omega,
            PotentialArg::Pi => PotentialKind::Pi,
            PotentialArg::PiDemand => PotentialKind::PiOnDemand,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioArg {
    Bss,
    Mixed,
    Realistic,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Scenario {
        match s {
            ScenarioArg::Bss => Scenario::Bss,
            ScenarioArg::Mixed => Scenario::Mixed,
            ScenarioArg::Realistic => Scenario::Realistic,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 3.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 0.01)]
    pub station_fraction: f64,
    #[arg(long, default_value_t = 1.0)]
    pub roughness: f64,
    /// Battery capacity in Wh.
    #[arg(long, default_value_t = 16_000.0)]
    pub capacity: f64,
    #[arg(long, value_enum, default_value_t = ScenarioArg::Mixed)]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Instance file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of uniformly random queries to write to `--queries-out`.
    #[arg(long, default_value_t = 0)]
    pub queries: usize,
    #[arg(long, requires = "queries")]
    pub queries_out: Option<PathBuf>,
    /// Initial SoC of generated queries in Wh; defaults to the capacity.
    #[arg(long)]
    pub soc: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Contraction stops before the core's average degree exceeds this.
    #[arg(long, default_value_t = 32.0)]
    pub core_degree: f64,
    /// Keep one shortcut per vertex pair (for the heu-omega-aggr mode).
    #[arg(long)]
    pub aggressive: bool,
    /// Overlay file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct QueryArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Overlay built from the instance; without it the plain search runs.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    /// Query file with lines `q <s> <t> <soc_wh>`.
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Defaults to `pi` with an overlay and `zero` without.
    #[arg(long, value_enum)]
    pub potential: Option<PotentialArg>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Add wall-clock runtimes, which makes the output nondeterministic.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RankArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub overlay: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Largest rank exponent: ranks 2^0 ..= 2^max_rank.
    #[arg(long, default_value_t = 14)]
    pub max_rank: u32,
    /// Random sources, one query per rank each.
    #[arg(long, default_value_t = 100)]
    pub sources: usize,
    /// Initial SoC in Wh; defaults to the capacity.
    #[arg(long)]
    pub soc: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = PotentialArg::Pi)]
    pub potential: PotentialArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write `NA` instead of measured runtimes, for byte-identical reruns.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ValidateArgs {
    /// Directory of `<name>.ev` instances with `<name>.q` query files.
    pub dir: PathBuf,
    /// Grid step in Wh; capacity / 400 per instance when absent.
    #[arg(long)]
    pub delta: Option<f64>,
    /// JSON report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExperimentArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random queries per scenario.
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    #[arg(long, default_value_t = 16_000.0)]
    pub capacity: f64,
    /// Initial SoC in Wh; defaults to the capacity.
    #[arg(long)]
    pub soc: Option<f64>,
    #[arg(long, default_value_t = 32.0)]
    pub core_degree: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ScenarioArg::Bss, ScenarioArg::Mixed, ScenarioArg::Realistic])]
    pub scenario: Vec<ScenarioArg>,
    /// Per-query CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}
