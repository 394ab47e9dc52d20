//! SoC profiles: the battery-constrained consumption map of a path.

/// Maps the SoC at the start of a path to the SoC at its end.
///
/// Evaluates to `-inf` below `in_min`, to `out_max` once `soc - cost`
/// exceeds it, and to `soc - cost` otherwise. The infeasible profile has
/// `in_min = +inf` and evaluates to `-inf` everywhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SocProfile {
    pub in_min: f64,
    pub cost: f64,
    pub out_max: f64,
}

impl SocProfile {
    pub const INFEASIBLE: SocProfile = SocProfile {
        in_min: f64::INFINITY,
        cost: f64::INFINITY,
        out_max: f64::NEG_INFINITY,
    };

    pub fn new(in_min: f64, cost: f64, out_max: f64) -> Self {
        SocProfile {
            in_min,
            cost,
            out_max,
        }
    }

    /// The profile of an empty path.
    pub fn identity(capacity: f64) -> Self {
        SocProfile::new(0.0, 0.0, capacity)
    }

    /// Profile of a single arc with consumption `c`.
    pub fn arc(c: f64, capacity: f64) -> Self {
        SocProfile::new(c.max(0.0), c, capacity.min(capacity - c))
    }

    pub fn is_feasible(&self) -> bool {
        self.in_min.is_finite()
    }

    /// Exit SoC for entry SoC `soc`; `-inf` marks infeasibility.
    pub fn apply(&self, soc: f64) -> f64 {
        if soc.is_nan() || soc < self.in_min {
            return f64::NEG_INFINITY;
        }
        let out = soc - self.cost;
        if out > self.out_max {
            self.out_max
        } else {
            out
        }
    }

    /// Profile of traversing `self` and then `next`.
    pub fn link(&self, next: &SocProfile) -> SocProfile {
        if !self.is_feasible() || !next.is_feasible() || self.out_max < next.in_min {
            return SocProfile::INFEASIBLE;
        }
        SocProfile {
            in_min: self.in_min.max(self.cost + next.in_min),
            cost: (self.cost + next.cost).max(self.in_min - next.out_max),
            out_max: next.out_max.min(self.out_max - next.cost),
        }
    }

    /// Entry SoC above which the exit SoC saturates at `out_max`.
    pub fn saturation_level(&self) -> f64 {
        self.out_max + self.cost
    }

    /// Whether `self(s) >= other(s) - eps` for every `s` in `[0, capacity]`.
    pub fn dominates(&self, other: &SocProfile, capacity: f64, eps: f64) -> bool {
        if !other.is_feasible() || other.in_min > capacity {
            return true;
        }
        if !self.is_feasible() || self.in_min > other.in_min + eps {
            return false;
        }
        let lo = other.in_min.max(0.0);
        let probes = [
            lo,
            capacity,
            self.saturation_level(),
            other.saturation_level(),
        ];
        probes
            .iter()
            .filter(|&&s| s >= lo && s <= capacity)
            .all(|&s| self.apply(s.max(self.in_min)) >= other.apply(s) - eps)
    }
}
