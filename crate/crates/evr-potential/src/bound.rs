//! Convex, decreasing piecewise-linear lower bounds mapping SoC to time.

const SLOPE_EPS: f64 = 1e-9;
const COORD_EPS: f64 = 1e-9;

/// Breakpoints `(soc, time)` with SoC strictly increasing and time strictly
/// decreasing. The function is infinite below the first SoC, constant from
/// the last one, and linear in between. No breakpoints means infinite
/// everywhere.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexBound {
    pts: Vec<(f64, f64)>,
}

fn slope(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1) / (b.0 - a.0)
}

fn same(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() <= COORD_EPS * a.0.abs().max(1.0)
        && (a.1 - b.1).abs() <= COORD_EPS * a.1.abs().max(1.0)
}

impl ConvexBound {
    pub fn empty() -> Self {
        ConvexBound { pts: Vec::new() }
    }

    pub fn point(soc: f64, time: f64) -> Self {
        ConvexBound {
            pts: vec![(soc, time)],
        }
    }

    /// Largest convex decreasing function below every given point, each point
    /// standing for "at least this SoC yields at most this time".
    pub fn from_points(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut pts: Vec<(f64, f64)> = points
            .into_iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .collect();
        if pts.is_empty() {
            return Self::empty();
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut last = 0;
        for (i, p) in pts.iter().enumerate() {
            if p.1 < pts[last].1 {
                last = i;
            }
        }
        pts.truncate(last + 1);
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            if let Some(&q) = hull.last() {
                if p.0 - q.0 <= COORD_EPS * q.0.abs().max(1.0) {
                    // Same SoC: the first one has the smaller time.
                    if p.1 < q.1 {
                        hull.pop();
                    } else {
                        continue;
                    }
                }
            }
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if slope(b, p) <= slope(a, b) + SLOPE_EPS {
                    hull.pop();
                } else {
                    break;
                }
            }
            if hull.last().is_some_and(|&q| p.1 >= q.1) {
                continue;
            }
            hull.push(p);
        }
        ConvexBound { pts: hull }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.pts
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// Value at `soc`; SoC values within 1e-9 below the first breakpoint
    /// count as reaching it.
    pub fn eval(&self, soc: f64) -> f64 {
        let pts = &self.pts;
        let Some(&first) = pts.first() else {
            return f64::INFINITY;
        };
        if soc < first.0 - COORD_EPS * first.0.abs().max(1.0) || soc.is_nan() {
            return f64::INFINITY;
        }
        if soc <= first.0 {
            return first.1;
        }
        let last = pts[pts.len() - 1];
        if soc >= last.0 {
            return last.1;
        }
        let i = pts.partition_point(|p| p.0 <= soc);
        let (a, b) = (pts[i - 1], pts[i]);
        a.1 + (soc - a.0) * slope(a, b)
    }

    /// Smallest value taken, infinite for the empty bound.
    pub fn min_value(&self) -> f64 {
        self.pts.last().map_or(f64::INFINITY, |p| p.1)
    }

    /// Time of the first breakpoint, the largest finite value.
    pub fn first_time(&self) -> f64 {
        self.pts.first().map_or(f64::INFINITY, |p| p.1)
    }

    /// Moves every breakpoint by `(cons, drive)`: the bound before an arc.
    pub fn shift(&self, cons: f64, drive: f64) -> Self {
        ConvexBound {
            pts: self
                .pts
                .iter()
                .map(|&(b, t)| (b + cons, t + drive))
                .collect(),
        }
    }

    /// Convex lower hull of the pointwise minimum.
    pub fn merge(&self, other: &Self) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        Self::from_points(self.pts.iter().chain(&other.pts).copied())
    }

    /// Adds charging at a station of maximum rate `rate` (SoC per second):
    /// below the pivot the bound is replaced by a segment of slope `-1/rate`
    /// ending at the pivot and starting at SoC 0.
    pub fn extend(&self, rate: f64) -> Self {
        if self.pts.is_empty() || rate.is_nan() || rate <= 0.0 {
            return self.clone();
        }
        let inv = -1.0 / rate;
        let steep = self
            .pts
            .windows(2)
            .take_while(|w| slope(w[0], w[1]) <= inv)
            .count();
        let (b, t) = self.pts[steep];
        if b <= 0.0 {
            return self.clone();
        }
        let mut pts = Vec::with_capacity(self.pts.len() - steep + 1);
        pts.push((0.0, t + b / rate));
        pts.extend_from_slice(&self.pts[steep..]);
        ConvexBound { pts }
    }

    /// Bound for traversing `self` then `other`: the minimum over all splits
    /// of the SoC between both parts.
    pub fn link(&self, other: &Self) -> Self {
        let (a, b) = (&self.pts, &other.pts);
        if a.is_empty() || b.is_empty() {
            return Self::empty();
        }
        let next_slope = |p: &[(f64, f64)], i: usize| {
            if i + 1 < p.len() {
                slope(p[i], p[i + 1])
            } else {
                0.0
            }
        };
        let (mut i, mut j) = (0, 0);
        let mut pts = vec![(a[0].0 + b[0].0, a[0].1 + b[0].1)];
        while i + 1 < a.len() || j + 1 < b.len() {
            let (sa, sb) = (next_slope(a, i), next_slope(b, j));
            if i + 1 < a.len() && sa <= sb {
                i += 1;
            }
            if j + 1 < b.len() && sb <= sa {
                j += 1;
            }
            pts.push((a[i].0 + b[j].0, a[i].1 + b[j].1));
        }
        Self::from_points(pts)
    }

    /// Whether `candidate` lies below `self` by more than the tolerance
    /// anywhere.
    pub fn is_improved_by(&self, candidate: &Self) -> bool {
        let Some(&first) = candidate.pts.first() else {
            return false;
        };
        let below = |b: f64| {
            let (c, s) = (candidate.eval(b), self.eval(b));
            c.is_finite() && (s.is_infinite() || c < s - COORD_EPS * s.abs().max(1.0))
        };
        below(first.0) || candidate.pts.iter().chain(&self.pts).any(|p| below(p.0))
    }

    /// Smallest time among breakpoints of `self` absent from `old`.
    pub fn min_new_time(&self, old: &Self) -> Option<f64> {
        let mut j = 0;
        let mut best: Option<f64> = None;
        for &p in &self.pts {
            while j < old.pts.len() && old.pts[j].0 < p.0 - COORD_EPS * p.0.abs().max(1.0) {
                j += 1;
            }
            let known = old.pts[j.min(old.pts.len())..]
                .iter()
                .take(2)
                .any(|&q| same(p, q));
            if !known {
                best = Some(best.map_or(p.1, |b| b.min(p.1)));
            }
        }
        best
    }
}
