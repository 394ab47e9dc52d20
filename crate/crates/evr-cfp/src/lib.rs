//! Label-setting search over SoC functions.
//!
//! Labels carry the trip time up to the last charging station, the SoC on
//! arrival there, that station, and the SoC profile of the path driven since.
//! Charging decisions at the last station stay open until a new station is
//! reached, where one label is spawned per breakpoint of the SoC function.

mod itinerary;
mod search;

pub use itinerary::{verify_itinerary, Itinerary, Stop, VerifyError};
pub use search::{
    cfp_query, switching_candidates, Config, Event, Outcome, RawRoute, SearchArc, SearchError,
    SearchGraph, Stats,
};
