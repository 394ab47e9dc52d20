use evr_cfp::{Itinerary, Stats};
use evr_model::VertexId;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopReport {
    pub vertex: VertexId,
    pub arrival_soc_wh: f64,
    pub depart_soc_wh: f64,
    /// Charging duration including the station's init time.
    pub duration_s: f64,
}

/// One query result as a flat JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    /// `"FEASIBLE"` or `"INFEASIBLE"`.
    pub status: String,
    pub trip_time_s: Option<f64>,
    pub drive_time_s: Option<f64>,
    pub charge_time_s: Option<f64>,
    pub stops: Vec<StopReport>,
    pub path: Vec<VertexId>,
    pub labels_settled: u64,
    pub dominance_checks: u64,
}

impl QueryReport {
    pub fn new(itinerary: Option<&Itinerary>, stats: &Stats) -> Self {
        let status = if itinerary.is_some() {
            "FEASIBLE"
        } else {
            "INFEASIBLE"
        };
        QueryReport {
            status: status.to_string(),
            trip_time_s: itinerary.map(|it| it.trip_time),
            drive_time_s: itinerary.map(|it| it.drive_time),
            charge_time_s: itinerary.map(|it| it.charge_time),
            stops: itinerary
                .map(|it| {
                    it.stops
                        .iter()
                        .map(|s| StopReport {
                            vertex: s.vertex,
                            arrival_soc_wh: s.arrival_soc,
                            depart_soc_wh: s.depart_soc,
                            duration_s: s.duration + s.init_time,
                        })
                        .collect()
                })
                .unwrap_or_default(),
            path: itinerary.map(|it| it.path.clone()).unwrap_or_default(),
            labels_settled: stats.labels_settled,
            dominance_checks: stats.dominance_checks,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == "FEASIBLE"
    }

    /// Single-line JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report fields serialize")
    }
}

impl crate::QueryResult {
    pub fn report(&self) -> QueryReport {
        QueryReport::new(self.itinerary.as_ref(), &self.stats)
    }
}
