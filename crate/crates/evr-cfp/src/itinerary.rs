use crate::search::{Event, RawRoute};
use evr_model::{Graph, VertexId, EPS, NONE};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct Stop {
    pub vertex: VertexId,
    /// Position of `vertex` in [`Itinerary::path`].
    pub path_index: usize,
    pub arrival_soc: f64,
    pub depart_soc: f64,
    /// Charging duration, excluding the init time.
    pub duration: f64,
    pub init_time: f64,
}

/// A route on base arcs with its charging stops.
#[derive(Clone, Debug, PartialEq)]
pub struct Itinerary {
    pub trip_time: f64,
    pub drive_time: f64,
    /// Time spent at stations, init times included.
    pub charge_time: f64,
    pub path: Vec<VertexId>,
    pub arcs: Vec<u32>,
    pub stops: Vec<Stop>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("arc {arc} does not continue the path at position {index}")]
    Discontinuous { index: usize, arc: u32 },
    #[error("stop at vertex {0} is not a charging station")]
    NotAStation(VertexId),
    #[error("stop at path index {0} is out of order or out of range")]
    BadStopIndex(usize),
    #[error("SoC drops to {soc} on arc {arc}")]
    Depleted { arc: u32, soc: f64 },
    #[error("arrival SoC {soc} at station {vertex} exceeds its charge limit {max}")]
    AboveChargeLimit {
        vertex: VertexId,
        soc: f64,
        max: f64,
    },
    #[error("recorded {what} {recorded} disagrees with simulated {simulated}")]
    Mismatch {
        what: &'static str,
        recorded: f64,
        simulated: f64,
    },
}

impl Itinerary {
    /// Builds an itinerary from events whose arc ids are base arc ids of `g`.
    pub fn from_route(g: &Graph, source: VertexId, route: &RawRoute) -> Self {
        let mut it = Itinerary {
            trip_time: route.trip_time,
            drive_time: 0.0,
            charge_time: 0.0,
            path: vec![source],
            arcs: Vec::new(),
            stops: Vec::new(),
        };
        for ev in &route.events {
            match *ev {
                Event::Arc { id, .. } => {
                    let a = g.arc(id);
                    it.drive_time += a.drive;
                    it.arcs.push(id);
                    it.path.push(a.head);
                }
                Event::Stop {
                    vertex,
                    arrival_soc,
                    depart_soc,
                    duration,
                    init_time,
                } => {
                    it.charge_time += duration + init_time;
                    it.stops.push(Stop {
                        vertex,
                        path_index: it.path.len() - 1,
                        arrival_soc,
                        depart_soc,
                        duration,
                        init_time,
                    });
                }
            }
        }
        it
    }
}

/// Replays the itinerary on `g` from initial SoC `soc` and returns the
/// simulated trip time.
pub fn verify_itinerary(g: &Graph, it: &Itinerary, soc: f64) -> Result<f64, VerifyError> {
    let m = g.capacity();
    let tol = 1e-6 * m.max(1.0);
    if it.arcs.len() + 1 != it.path.len() {
        return Err(VerifyError::Discontinuous {
            index: it.arcs.len(),
            arc: NONE,
        });
    }
    let mut soc = soc;
    let mut time = 0.0;
    let mut stops = it.stops.iter().peekable();
    let mut last_index = None;
    for i in 0..it.path.len() {
        if i > 0 {
            let id = it.arcs[i - 1];
            let a = g.arc(id);
            if a.tail != it.path[i - 1] || a.head != it.path[i] {
                return Err(VerifyError::Discontinuous {
                    index: i - 1,
                    arc: id,
                });
            }
            soc = (soc - a.cons).min(m);
            if soc < -EPS {
                return Err(VerifyError::Depleted { arc: id, soc });
            }
            soc = soc.max(0.0);
            time += a.drive;
        }
        while let Some(stop) = stops.next_if(|s| s.path_index == i) {
            if last_index == Some(i) || stop.vertex != it.path[i] {
                return Err(VerifyError::BadStopIndex(i));
            }
            last_index = Some(i);
            let cf = &g
                .station_at(stop.vertex)
                .ok_or(VerifyError::NotAStation(stop.vertex))?
                .cf;
            if soc > cf.alpha_max() + EPS {
                return Err(VerifyError::AboveChargeLimit {
                    vertex: stop.vertex,
                    soc,
                    max: cf.alpha_max(),
                });
            }
            check("arrival SoC", stop.arrival_soc, soc, tol)?;
            soc = cf.charge(soc, stop.duration);
            check("departure SoC", stop.depart_soc, soc, tol)?;
            time += stop.duration + stop.init_time;
        }
    }
    if let Some(s) = stops.next() {
        return Err(VerifyError::BadStopIndex(s.path_index));
    }
    check("trip time", it.trip_time, time, 1e-6 * time.abs().max(1.0))?;
    Ok(time)
}

fn check(what: &'static str, recorded: f64, simulated: f64, tol: f64) -> Result<(), VerifyError> {
    if (recorded - simulated).abs() > tol {
        return Err(VerifyError::Mismatch {
            what,
            recorded,
            simulated,
        });
    }
    Ok(())
}
