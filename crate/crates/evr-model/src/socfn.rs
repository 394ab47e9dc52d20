//! SoC functions of search labels.
//!
//! A label `(tau, b, u, P)` induces `f(t) = P(cf_u(b, t - tau))` for
//! `t >= tau`. For piecewise-linear charging curves `f` is piecewise linear,
//! `-inf` before its first breakpoint and constant after its last one. A
//! breakpoint list `[(t_1, y_1), ..., (t_k, y_k)]` with strictly increasing
//! `t` represents it; an empty list means `f = -inf`.

use crate::charging::ChargingFunction;
use crate::profile::SocProfile;

/// Writes the breakpoints of the label's SoC function into `out`.
///
/// `out` stays empty when the profile cannot be satisfied at the station.
pub fn breakpoints(
    tau: f64,
    soc: f64,
    cf: &ChargingFunction,
    profile: &SocProfile,
    out: &mut Vec<(f64, f64)>,
) {
    out.clear();
    let amax = cf.alpha_max();
    if !profile.is_feasible() || profile.in_min > amax {
        return;
    }
    let pts = cf.points();
    let start = soc.max(cf.alpha_min()).min(amax);
    let s0 = cf.time_of(soc);
    let (x1, y1) = if profile.in_min <= start {
        (0.0, start)
    } else {
        (cf.time_of(profile.in_min) - s0, profile.in_min)
    };
    let out_of = |y: f64| (y - profile.cost).min(profile.out_max).max(0.0);
    let top = profile.saturation_level().min(amax);
    out.push((tau + x1, out_of(y1)));
    if y1 >= top {
        return;
    }
    for &(ti, bi) in pts {
        if bi > y1 && bi < top {
            let t = tau + ti - s0;
            if t > out[out.len() - 1].0 {
                out.push((t, bi - profile.cost));
            }
        }
    }
    let t_end = tau + cf.time_of(top) - s0;
    let y_end = out_of(top);
    if t_end > out[out.len() - 1].0 {
        out.push((t_end, y_end));
    } else {
        let last = out.len() - 1;
        out[last].1 = out[last].1.max(y_end);
    }
}

/// Value of the SoC function at trip time `t`.
pub fn eval(f: &[(f64, f64)], t: f64) -> f64 {
    if f.is_empty() || t < f[0].0 {
        return f64::NEG_INFINITY;
    }
    let i = f.partition_point(|&(ti, _)| ti <= t);
    if i == f.len() {
        return f[f.len() - 1].1;
    }
    let (t0, y0) = f[i - 1];
    let (t1, y1) = f[i];
    y0 + (t - t0) * (y1 - y0) / (t1 - t0)
}

/// Least trip time at which the function reaches `level`, if any.
pub fn first_time_reaching(f: &[(f64, f64)], level: f64) -> Option<f64> {
    let first = *f.first()?;
    if first.1 >= level {
        return Some(first.0);
    }
    for w in f.windows(2) {
        let ((t0, y0), (t1, y1)) = (w[0], w[1]);
        if y1 >= level {
            return Some(t0 + (level - y0) * (t1 - t0) / (y1 - y0));
        }
    }
    None
}

/// Whether `f >= g - eps` at every trip time.
///
/// Both functions are piecewise linear on the common domain, so a merged
/// scan over the breakpoints of both suffices.
pub fn dominates(f: &[(f64, f64)], g: &[(f64, f64)], eps: f64) -> bool {
    if g.is_empty() {
        return true;
    }
    if f.is_empty() || f[0].0 > g[0].0 + eps {
        return false;
    }
    let start = g[0].0;
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let ti = f.get(i).map_or(f64::INFINITY, |p| p.0);
        let tj = g.get(j).map_or(f64::INFINITY, |p| p.0);
        let t = ti.min(tj);
        if t == f64::INFINITY {
            return true;
        }
        if t >= start {
            let probe = t.max(f[0].0);
            if eval(f, probe) < eval(g, t) - eps {
                return false;
            }
        }
        if ti <= t {
            i += 1;
        }
        if tj <= t {
            j += 1;
        }
    }
}
