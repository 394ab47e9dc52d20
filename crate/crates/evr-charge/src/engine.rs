use crate::bounds::CoreBounds;
use crate::graphs::{ComponentZero, ForwardGraph, PotentialGraph};
use evr_cfp::{cfp_query, Config, Itinerary, Outcome, SearchError, Stats};
use evr_ch::{Overlay, QueryGraph, TargetArcs};
use evr_model::{Potential, VertexId, ZeroPotential};
use evr_potential::{OmegaTables, PiSearch, PiStats, Suspension};
use std::fmt;
use thiserror::Error;

/// Which lower bound guides the search phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PotentialKind {
    Zero,
    Omega,
    Pi,
    PiOnDemand,
}

/// Exact search or one of the heuristics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    /// At most one new label per head in each vertex scan, the one of
    /// minimum key.
    HeuPi,
    /// One precomputed overlay arc per vertex pair, minimizing
    /// `drive + cost / max_rate`.
    HeuOmega,
    /// As [`Mode::HeuOmega`], on an overlay contracted with the same rule.
    HeuOmegaAggressive,
}

impl Mode {
    pub fn is_heuristic(self) -> bool {
        self != Mode::Exact
    }

    /// Whether the mode runs on an aggressively contracted overlay.
    pub fn needs_aggressive(self) -> bool {
        self == Mode::HeuOmegaAggressive
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::HeuPi => "heu-pi",
            Mode::HeuOmega => "heu-omega",
            Mode::HeuOmegaAggressive => "heu-omega-aggr",
        })
    }
}

/// One query in original vertex ids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueryPlan {
    pub source: VertexId,
    pub target: VertexId,
    pub soc: f64,
    pub potential: PotentialKind,
    pub mode: Mode,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("mode {mode} needs an {} overlay", if *.aggressive_needed { "aggressive" } else { "exact" })]
    ModeMismatch { mode: Mode, aggressive_needed: bool },
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Clone, Debug)]
pub struct QueryResult {
    /// The route in original ids, `None` when infeasible.
    pub itinerary: Option<Itinerary>,
    /// Key of the initial label, a lower bound on the optimal trip time.
    pub lower_bound_at_source: f64,
    /// Counters of the search phase.
    pub stats: Stats,
    /// Labels settled while building the temporary arcs.
    pub target_labels: u64,
    pub temporary_arcs: usize,
    /// Counters of the π search, if one ran.
    pub pi: Option<PiStats>,
}

impl QueryResult {
    pub fn trip_time(&self) -> Option<f64> {
        self.itinerary.as_ref().map(|it| it.trip_time)
    }
}

/// Shared per-overlay query data. Queries borrow it immutably and may run
/// concurrently.
pub struct Engine<'a> {
    overlay: &'a Overlay,
    bounds: CoreBounds,
    omega_best: Vec<Vec<u32>>,
    suspension: Suspension,
}

impl<'a> Engine<'a> {
    pub fn new(overlay: &'a Overlay) -> Self {
        Engine {
            overlay,
            bounds: CoreBounds::build(overlay),
            omega_best: omega_best(overlay),
            suspension: Suspension::default(),
        }
    }

    pub fn with_suspension(mut self, suspension: Suspension) -> Self {
        self.suspension = suspension;
        self
    }

    pub fn overlay(&self) -> &'a Overlay {
        self.overlay
    }

    pub fn core_bounds(&self) -> &CoreBounds {
        &self.bounds
    }

    /// Per vertex, the overlay arcs the ω heuristics scan.
    pub fn omega_choices(&self) -> &[Vec<u32>] {
        &self.omega_best
    }

    pub fn check(&self, mode: Mode) -> Result<(), EngineError> {
        let aggressive = self.overlay.is_aggressive();
        if aggressive != mode.needs_aggressive() {
            return Err(EngineError::ModeMismatch {
                mode,
                aggressive_needed: mode.needs_aggressive(),
            });
        }
        Ok(())
    }

    pub fn query(&self, plan: &QueryPlan) -> Result<QueryResult, EngineError> {
        self.check(plan.mode)?;
        let ov = self.overlay;
        let n = ov.num_vertices();
        for v in [plan.source, plan.target] {
            if v as usize >= n {
                return Err(SearchError::VertexOutOfRange(v).into());
            }
        }
        let (s, t) = (ov.to_internal(plan.source), ov.to_internal(plan.target));
        let targets = TargetArcs::build(ov, t);
        let fwd = ForwardGraph {
            query: QueryGraph {
                overlay: ov,
                targets: &targets,
            },
            restrict: matches!(plan.mode, Mode::HeuOmega | Mode::HeuOmegaAggressive)
                .then_some(&self.omega_best[..]),
        };
        let cfg = Config {
            one_label_per_head: plan.mode == Mode::HeuPi,
        };
        let pg = PotentialGraph {
            overlay: ov,
            bounds: &self.bounds,
            targets: &targets,
        };
        let capacity = ov.graph().capacity();
        let core_size = ov.core_size();
        let mut pi_stats = None;
        let outcome = match plan.potential {
            PotentialKind::Zero => search(&fwd, ZeroPotential, core_size, (s, t, plan.soc), cfg)?.0,
            PotentialKind::Omega => {
                let tables = OmegaTables::compute(&pg, t, capacity);
                search(&fwd, tables, core_size, (s, t, plan.soc), cfg)?.0
            }
            PotentialKind::Pi | PotentialKind::PiOnDemand => {
                let sus = (plan.potential == PotentialKind::PiOnDemand).then_some(self.suspension);
                let (out, pi) = search(
                    &fwd,
                    PiSearch::new(&pg, t, sus),
                    core_size,
                    (s, t, plan.soc),
                    cfg,
                )?;
                pi_stats = Some(pi.stats());
                out
            }
        };
        let itinerary = outcome
            .route
            .as_ref()
            .map(|r| ov.original_itinerary(s, &fwd.query.expand(r)));
        Ok(QueryResult {
            itinerary,
            lower_bound_at_source: outcome.source_key,
            stats: outcome.stats,
            target_labels: targets.labels_settled,
            temporary_arcs: targets.len(),
            pi: pi_stats,
        })
    }
}

/// Runs the search phase with `pot` on core vertices and returns the
/// potential for inspection.
fn search<P: Potential>(
    fwd: &ForwardGraph<'_>,
    pot: P,
    core_size: usize,
    (s, t, soc): (VertexId, VertexId, f64),
    cfg: Config,
) -> Result<(Outcome, P), SearchError> {
    let g = fwd.query.overlay.graph();
    let mut pot = ComponentZero {
        inner: pot,
        core_size,
    };
    let out = cfp_query(g, fwd, &mut pot, s, t, soc, cfg)?;
    Ok((out, pot.inner))
}

/// For each vertex, its forward overlay arcs reduced to one per head: the
/// one minimizing `drive + cost / max_rate`, ties to the lower id.
fn omega_best(ov: &Overlay) -> Vec<Vec<u32>> {
    let rate = ov.graph().max_rate();
    let omega = |id: u32| {
        let a = ov.arc(id);
        if rate > 0.0 {
            a.drive + a.profile.cost / rate
        } else {
            a.drive
        }
    };
    (0..ov.num_vertices() as VertexId)
        .map(|v| {
            let ids = if ov.is_core(v) {
                ov.core_out(v)
            } else {
                ov.up_out(v)
            };
            let mut best: Vec<u32> = Vec::new();
            for &id in ids {
                let head = ov.arc(id).head;
                match best.iter_mut().find(|b| ov.arc(**b).head == head) {
                    Some(b) => {
                        if omega(id) < omega(*b) || (omega(id) == omega(*b) && id < *b) {
                            *b = id;
                        }
                    }
                    None => best.push(id),
                }
            }
            best
        })
        .collect()
}
