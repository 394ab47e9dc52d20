use evr_model::ChargingFunction;
use std::fmt;
use std::str::FromStr;

/// Station types of the built-in library.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StationType {
    Swap,
    Super,
    Kw44,
    Kw22,
    Kw11,
}

pub const ALL_TYPES: [StationType; 5] = [
    StationType::Swap,
    StationType::Super,
    StationType::Kw44,
    StationType::Kw22,
    StationType::Kw11,
];

/// SoC levels of the curve breakpoints, as fractions of capacity.
const LEVELS: [f64; 6] = [0.0, 0.8, 0.85, 0.9, 0.95, 1.0];

impl StationType {
    pub fn name(self) -> &'static str {
        match self {
            StationType::Swap => "SWAP",
            StationType::Super => "SUPER",
            StationType::Kw44 => "KW44",
            StationType::Kw22 => "KW22",
            StationType::Kw11 => "KW11",
        }
    }

    /// Setup time before charging starts, in seconds.
    pub fn init_time(self) -> f64 {
        match self {
            StationType::Swap => 180.0,
            _ => 60.0,
        }
    }

    /// Power up to 80% SoC in Wh per second; `None` for swapping.
    fn power(self, capacity: f64) -> Option<f64> {
        match self {
            StationType::Swap => None,
            // 80% in 34 minutes regardless of capacity.
            StationType::Super => Some(0.8 * capacity / (34.0 * 60.0)),
            StationType::Kw44 => Some(44_000.0 / 3600.0),
            StationType::Kw22 => Some(22_000.0 / 3600.0),
            StationType::Kw11 => Some(11_000.0 / 3600.0),
        }
    }

    /// Breakpoints `(t, soc)` of the curve: constant power up to 80%, then
    /// half the previous effective power in each 5% band.
    pub fn curve_points(self, capacity: f64) -> Option<Vec<(f64, f64)>> {
        let p = self.power(capacity)?;
        let mut pts = vec![(0.0, 0.0)];
        let mut t = 0.8 * capacity / p;
        pts.push((t, 0.8 * capacity));
        let mut power = p;
        for &level in &LEVELS[2..] {
            power /= 2.0;
            t += 0.05 * capacity / power;
            pts.push((t, level * capacity));
        }
        Some(pts)
    }

    pub fn charging_function(self, capacity: f64) -> ChargingFunction {
        match self.curve_points(capacity) {
            None => ChargingFunction::swap(capacity, self.init_time()),
            Some(pts) => ChargingFunction::curve(pts, self.init_time(), capacity),
        }
        .expect("library curves are concave and within capacity")
    }
}

impl fmt::Display for StationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ALL_TYPES
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown station type {s:?}"))
    }
}
