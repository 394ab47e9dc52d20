use evr_model::{ChargingFunction, ModelError};
use proptest::prelude::*;

fn three_segment_curve() -> ChargingFunction {
    ChargingFunction::curve(
        vec![(0.0, 0.0), (3.0, 4.5), (5.0, 5.5), (7.0, 6.0)],
        0.0,
        6.0,
    )
    .unwrap()
}

fn four_point_curve() -> ChargingFunction {
    ChargingFunction::curve(
        vec![(0.0, 0.0), (1.0, 2.0), (2.0, 3.0), (5.0, 4.0)],
        0.0,
        4.0,
    )
    .unwrap()
}

#[test]
fn charging_from_three_for_two_seconds_reaches_five() {
    assert!((three_segment_curve().eval(3.0, 2.0).unwrap() - 5.0).abs() <= 1e-9);
}

#[test]
fn zero_duration_keeps_the_soc() {
    assert_eq!(three_segment_curve().eval(2.5, 0.0).unwrap(), 2.5);
}

#[test]
fn swap_always_fills_the_battery() {
    let cf = ChargingFunction::swap(10.0, 180.0).unwrap();
    assert_eq!(cf.eval(3.0, 0.0).unwrap(), 10.0);
    assert_eq!(cf.alpha_min(), 10.0);
    assert_eq!(cf.alpha_max(), 10.0);
    assert!((cf.max_rate() - 10.0 / 180.0).abs() < 1e-15);
}

#[test]
fn inverse_durations() {
    assert!((four_point_curve().duration(0.0, 0.5).unwrap() - 0.25).abs() <= 1e-9);
    assert_eq!(four_point_curve().duration(1.3, 1.3).unwrap(), 0.0);
    // 3 is reached after 2 s, the plateau 6 after 7 s.
    assert!((three_segment_curve().duration(3.0, 6.0).unwrap() - 5.0).abs() <= 1e-9);
    assert!(matches!(
        three_segment_curve().duration(0.0, 6.5),
        Err(ModelError::UnreachableSoc { .. })
    ));
}

#[test]
fn eval_rejects_arrival_above_the_plateau() {
    let cf = ChargingFunction::curve(vec![(0.0, 0.0), (10.0, 8.0)], 0.0, 10.0).unwrap();
    assert!(matches!(
        cf.eval(9.0, 1.0),
        Err(ModelError::SocAboveMax { .. })
    ));
}

#[test]
fn max_rate_counts_the_initial_jump() {
    let cf = ChargingFunction::curve(vec![(0.0, 2.0), (4.0, 6.0)], 1.0, 10.0).unwrap();
    assert_eq!(cf.max_rate(), 2.0);
    let cf = ChargingFunction::curve(vec![(0.0, 2.0), (1.0, 6.0)], 1.0, 10.0).unwrap();
    assert_eq!(cf.max_rate(), 4.0);
}

#[test]
fn invalid_curves_are_rejected() {
    let bad = [
        (vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)], 0.0),
        (vec![(0.0, 0.0), (1.0, 1.0), (1.0, 2.0)], 0.0),
        (vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)], 0.0),
        (vec![(1.0, 0.0), (2.0, 1.0)], 0.0),
        (vec![(0.0, 1.0), (2.0, 3.0)], 0.0),
        (vec![(0.0, 0.0), (2.0, 30.0)], 0.0),
        (vec![], 0.0),
    ];
    for (pts, init) in bad {
        assert!(
            ChargingFunction::curve(pts.clone(), init, 10.0).is_err(),
            "{pts:?}"
        );
    }
    assert!(ChargingFunction::swap(10.0, 0.0).is_err());
}

/// Random concave curve with integer-valued data.
fn concave_curve() -> impl Strategy<Value = ChargingFunction> {
    (
        0u32..3,
        prop::collection::vec((1u32..6, 1u32..6), 1..5),
        0u32..3,
    )
        .prop_map(|(a0, segs, init)| {
            let mut segs: Vec<(f64, f64)> = segs
                .into_iter()
                .map(|(dt, db)| (dt as f64, db as f64))
                .collect();
            segs.sort_by(|x, y| (y.1 / y.0).total_cmp(&(x.1 / x.0)));
            let mut pts = vec![(0.0, a0 as f64)];
            for (dt, db) in segs {
                let (t, b) = pts[pts.len() - 1];
                pts.push((t + dt, b + db));
            }
            let init = if a0 > 0 {
                init as f64 + 1.0
            } else {
                init as f64
            };
            ChargingFunction::curve(pts, init, 100.0).unwrap()
        })
}

proptest! {
    #[test]
    fn shifting_property(cf in concave_curve(), b in 0.0..1.0f64, t1 in 0.0..10.0f64, t2 in 0.0..10.0f64) {
        let b = b * cf.alpha_max();
        let split = cf.charge(cf.charge(b, t1), t2);
        let joint = cf.charge(b, t1 + t2);
        prop_assert!((split - joint).abs() <= 1e-9, "{} vs {}", split, joint);
    }

    #[test]
    fn charging_is_monotone(cf in concave_curve(), b1 in 0.0..1.0f64, b2 in 0.0..1.0f64, t1 in 0.0..10.0f64, t2 in 0.0..10.0f64) {
        let m = cf.alpha_max();
        let (b1, b2) = (b1.min(b2) * m, b1.max(b2) * m);
        let (t1, t2) = (t1.min(t2), t1.max(t2));
        prop_assert!(cf.charge(b1, t1) <= cf.charge(b2, t1) + 1e-12);
        prop_assert!(cf.charge(b1, t1) <= cf.charge(b1, t2) + 1e-12);
    }

    #[test]
    fn duration_inverts_charging(cf in concave_curve(), b in 0.0..1.0f64, t in 0.0..20.0f64) {
        let b = b * cf.alpha_max();
        let reached = cf.charge(b, t);
        let need = cf.duration(b, reached).unwrap();
        prop_assert!(need <= t + 1e-9);
        prop_assert!((cf.charge(b, need) - reached).abs() <= 1e-9);
    }

    #[test]
    fn max_rate_bounds_every_charging_step(cf in concave_curve(), b in 0.0..1.0f64, t in 0.0..5.0f64) {
        let b = b * cf.alpha_max();
        let gained = cf.charge(b, t) - b;
        prop_assert!(gained <= cf.max_rate() * (t + cf.init_time()) + 1e-9);
    }
}
