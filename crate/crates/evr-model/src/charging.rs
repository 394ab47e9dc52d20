//! Charging functions in univariate form.
//!
//! A station is described by a concave, increasing curve `c(t)` that starts
//! empty-handed at `c(0) = alpha_min` and plateaus at `alpha_max` from time
//! `T` on. Charging from arrival SoC `b` for `t` seconds yields
//! `c(T_inv(b) + t)`, where the expanded inverse `T_inv` is 0 below
//! `alpha_min` and `T` above `alpha_max`.

use crate::error::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChargingKind {
    /// Battery swap: the SoC becomes `M` after the fixed init time.
    Swap,
    /// Piecewise-linear concave curve.
    Curve,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChargingFunction {
    kind: ChargingKind,
    /// `(t, soc)` breakpoints with `t[0] = 0`; both coordinates strictly increase.
    points: Vec<(f64, f64)>,
    init_time: f64,
    max_rate: f64,
}

const SLOPE_TOL: f64 = 1e-12;

impl ChargingFunction {
    /// Battery-swap station for capacity `capacity`.
    pub fn swap(capacity: f64, init_time: f64) -> Result<Self, ModelError> {
        if !(init_time > 0.0 && init_time.is_finite()) {
            return Err(ModelError::BadCurve(format!(
                "swap stations need a positive init time, got {init_time}"
            )));
        }
        Ok(ChargingFunction {
            kind: ChargingKind::Swap,
            points: vec![(0.0, capacity)],
            init_time,
            max_rate: capacity / init_time,
        })
    }

    /// Piecewise-linear concave curve given as `(t, soc)` breakpoints.
    pub fn curve(
        points: Vec<(f64, f64)>,
        init_time: f64,
        capacity: f64,
    ) -> Result<Self, ModelError> {
        let bad = |msg: String| Err(ModelError::BadCurve(msg));
        if points.is_empty() {
            return bad("no breakpoints".into());
        }
        if !(init_time >= 0.0 && init_time.is_finite()) {
            return bad(format!(
                "init time must be finite and >= 0, got {init_time}"
            ));
        }
        if points
            .iter()
            .any(|&(t, b)| !t.is_finite() || !b.is_finite())
        {
            return bad("non-finite breakpoint".into());
        }
        if points[0].0 != 0.0 {
            return bad(format!(
                "first breakpoint must be at t = 0, got {}",
                points[0].0
            ));
        }
        if points[0].1 < 0.0 {
            return bad(format!("negative SoC {}", points[0].1));
        }
        let last = points[points.len() - 1].1;
        if last > capacity + crate::EPS {
            return bad(format!("SoC {last} exceeds capacity {capacity}"));
        }
        let mut prev_slope = f64::INFINITY;
        for w in points.windows(2) {
            let (dt, db) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            if dt <= 0.0 {
                return bad(format!(
                    "times must strictly increase ({} -> {})",
                    w[0].0, w[1].0
                ));
            }
            if db <= 0.0 {
                return bad(format!(
                    "SoC must strictly increase ({} -> {})",
                    w[0].1, w[1].1
                ));
            }
            let slope = db / dt;
            if slope > prev_slope * (1.0 + SLOPE_TOL) {
                return bad(format!(
                    "curve is not concave: slope rises from {prev_slope} to {slope} at t = {}",
                    w[0].0
                ));
            }
            prev_slope = slope;
        }
        let alpha_min = points[0].1;
        if alpha_min > 0.0 && init_time == 0.0 {
            return bad("alpha_min > 0 requires a positive init time".into());
        }
        let mut max_rate = if points.len() > 1 {
            first_slope(&points)
        } else {
            0.0
        };
        if alpha_min > 0.0 {
            max_rate = max_rate.max(alpha_min / init_time);
        }
        Ok(ChargingFunction {
            kind: ChargingKind::Curve,
            points,
            init_time,
            max_rate,
        })
    }

    /// Constant function at `soc` with zero init time; models the source.
    pub fn constant(soc: f64) -> Self {
        ChargingFunction {
            kind: ChargingKind::Curve,
            points: vec![(0.0, soc)],
            init_time: 0.0,
            max_rate: 0.0,
        }
    }

    pub fn kind(&self) -> ChargingKind {
        self.kind
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn init_time(&self) -> f64 {
        self.init_time
    }

    pub fn alpha_min(&self) -> f64 {
        self.points[0].1
    }

    pub fn alpha_max(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    /// Time `T` at which the curve reaches its plateau.
    pub fn max_time(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Upper bound on the charging rate, counting the jump to `alpha_min`
    /// as a rate over the init time.
    pub fn max_rate(&self) -> f64 {
        self.max_rate
    }

    /// Smallest positive segment slope; `+inf` when the curve has no segment.
    pub fn min_rate(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .fold(f64::INFINITY, f64::min)
    }

    /// The curve `c(x)` for `x >= 0`.
    pub fn curve_at(&self, x: f64) -> f64 {
        let p = &self.points;
        if x <= 0.0 {
            return p[0].1;
        }
        let i = p.partition_point(|&(t, _)| t <= x);
        if i == p.len() {
            return p[p.len() - 1].1;
        }
        let (t0, b0) = p[i - 1];
        let (t1, b1) = p[i];
        b0 + (x - t0) * (b1 - b0) / (t1 - t0)
    }

    /// Expanded inverse `T_inv(b)`.
    pub fn time_of(&self, b: f64) -> f64 {
        let p = &self.points;
        if b <= p[0].1 {
            return 0.0;
        }
        let i = p.partition_point(|&(_, s)| s <= b);
        if i == p.len() {
            return p[p.len() - 1].0;
        }
        let (t0, b0) = p[i - 1];
        let (t1, b1) = p[i];
        t0 + (b - b0) * (t1 - t0) / (b1 - b0)
    }

    /// SoC after charging `t` seconds from arrival SoC `soc`.
    pub fn eval(&self, soc: f64, t: f64) -> Result<f64, ModelError> {
        if soc > self.alpha_max() + crate::EPS {
            return Err(ModelError::SocAboveMax {
                soc,
                max: self.alpha_max(),
            });
        }
        Ok(self.charge(soc, t))
    }

    /// Unchecked form of [`eval`](Self::eval); requires `soc <= alpha_max`.
    pub fn charge(&self, soc: f64, t: f64) -> f64 {
        if t <= 0.0 && soc >= self.alpha_min() {
            return soc;
        }
        self.curve_at(self.time_of(soc) + t)
    }

    /// Minimal charging time to get from `from` to `to`.
    pub fn duration(&self, from: f64, to: f64) -> Result<f64, ModelError> {
        if to > self.alpha_max() + crate::EPS {
            return Err(ModelError::UnreachableSoc {
                to,
                max: self.alpha_max(),
            });
        }
        Ok((self.time_of(to) - self.time_of(from)).max(0.0))
    }
}

fn first_slope(points: &[(f64, f64)]) -> f64 {
    (points[1].1 - points[0].1) / (points[1].0 - points[0].0)
}
