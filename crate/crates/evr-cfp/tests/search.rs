use evr_cfp::{
    cfp_query, switching_candidates, verify_itinerary, Config, Itinerary, Outcome, Stop,
    VerifyError,
};
use evr_model::{socfn, Arc, ChargingFunction, Graph, SocProfile, Station, ZeroPotential};
use proptest::prelude::*;

fn arc(tail: u32, head: u32, drive: f64, cons: f64) -> Arc {
    Arc {
        tail,
        head,
        drive,
        cons,
    }
}

/// Path s, v1, ..., v6, t with unit drive times and stations at v2 and v5.
fn two_station_path() -> Graph {
    let cons = [-2.0, 4.0, -1.0, 3.0, -1.0, 2.0, 1.0];
    let arcs = cons
        .iter()
        .enumerate()
        .map(|(i, &c)| arc(i as u32, i as u32 + 1, 1.0, c))
        .collect();
    let stations = vec![
        Station {
            vertex: 2,
            cf: ChargingFunction::curve(vec![(0.0, 0.0), (1.5, 3.0), (5.5, 5.0)], 0.0, 5.0)
                .unwrap(),
        },
        Station {
            vertex: 5,
            cf: ChargingFunction::curve(vec![(0.0, 0.0), (5.0, 5.0)], 0.0, 5.0).unwrap(),
        },
    ];
    Graph::new(8, 5.0, arcs, stations).unwrap()
}

fn run(g: &Graph, s: u32, t: u32, soc: f64, cfg: Config) -> Outcome {
    cfp_query(g, g, &mut ZeroPotential, s, t, soc, cfg).unwrap()
}

fn itinerary(g: &Graph, s: u32, out: &Outcome) -> Itinerary {
    Itinerary::from_route(g, s, out.route.as_ref().unwrap())
}

#[test]
fn two_station_path_charges_at_both_stations() {
    let g = two_station_path();
    let out = run(&g, 0, 7, 4.0, Config::default());
    let it = itinerary(&g, 0, &out);
    assert!((it.trip_time - 9.0).abs() <= 1e-9, "{}", it.trip_time);
    assert_eq!(it.path, (0..8).collect::<Vec<_>>());
    let stops: Vec<(u32, f64, f64)> = it
        .stops
        .iter()
        .filter(|s| s.duration > 1e-9)
        .map(|s| (s.vertex, s.arrival_soc, s.depart_soc))
        .collect();
    assert_eq!(stops.len(), 2);
    for (got, want) in stops.iter().zip([(2, 1.0, 3.0), (5, 2.0, 3.0)]) {
        assert_eq!(got.0, want.0);
        assert!(
            (got.1 - want.1).abs() <= 1e-9 && (got.2 - want.2).abs() <= 1e-9,
            "{got:?}"
        );
    }
    assert!((verify_itinerary(&g, &it, 4.0).unwrap() - 9.0).abs() <= 1e-9);
}

#[test]
fn label_reaching_second_station_offers_three_switching_times() {
    let g = two_station_path();
    let cf = &g.station_at(2).unwrap().cf;
    let p = [-1.0, 3.0, -1.0]
        .iter()
        .fold(SocProfile::identity(5.0), |a, &c| {
            a.link(&SocProfile::arc(c, 5.0))
        });
    let mut f = Vec::new();
    socfn::breakpoints(5.0, 1.0, cf, &p, &mut f);
    let want = [(5.5, 1.0), (6.0, 2.0), (8.0, 3.0)];
    assert_eq!(f.len(), want.len());
    for (a, b) in f.iter().zip(want) {
        assert!(
            (a.0 - b.0).abs() <= 1e-9 && (a.1 - b.1).abs() <= 1e-9,
            "{f:?}"
        );
    }
}

#[test]
fn switching_candidates_are_breakpoint_offsets() {
    let cf = ChargingFunction::curve(
        vec![(0.0, 0.0), (1.0, 2.0), (2.0, 3.0), (5.0, 4.0)],
        0.0,
        4.0,
    )
    .unwrap();
    let c = switching_candidates(3.0, 0.5, &cf, &SocProfile::new(1.0, -1.0, 3.0));
    assert_eq!(c.len(), 2);
    assert!(
        (c[0] - 0.25).abs() <= 1e-9 && (c[1] - 0.75).abs() <= 1e-9,
        "{c:?}"
    );
}

#[test]
fn source_equal_to_target_costs_nothing() {
    let g = two_station_path();
    let out = run(&g, 3, 3, 0.0, Config::default());
    let it = itinerary(&g, 3, &out);
    assert_eq!(it.trip_time, 0.0);
    assert!(it.arcs.is_empty());
}

#[test]
fn unreachable_and_infeasible_targets_yield_no_route() {
    let g = two_station_path();
    assert!(run(&g, 7, 0, 5.0, Config::default()).route.is_none());
    // Without enough charge to reach the first station.
    assert!(run(&g, 0, 7, 1.0, Config::default()).route.is_none());
}

#[test]
fn out_of_range_inputs_are_rejected() {
    let g = two_station_path();
    assert!(cfp_query(&g, &g, &mut ZeroPotential, 0, 99, 1.0, Config::default()).is_err());
    assert!(cfp_query(&g, &g, &mut ZeroPotential, 0, 7, 6.0, Config::default()).is_err());
}

#[test]
fn single_stop_alternatives_are_infeasible_or_slower() {
    let g = two_station_path();
    let cf2 = &g.station_at(2).unwrap().cf;
    let base = |stops: Vec<Stop>| Itinerary {
        trip_time: 0.0,
        drive_time: 7.0,
        charge_time: stops.iter().map(|s| s.duration).sum(),
        path: (0..8).collect(),
        arcs: (0..7).collect(),
        stops,
    };
    // Charging only at the second station: the first station is reached with SoC 1
    // and the climb to the second needs 2.
    let only_second = base(vec![Stop {
        vertex: 5,
        path_index: 5,
        arrival_soc: 0.0,
        depart_soc: 3.0,
        duration: 3.0,
        init_time: 0.0,
    }]);
    assert!(matches!(
        verify_itinerary(&g, &only_second, 4.0),
        Err(VerifyError::Depleted { .. })
    ));
    // Charging only at the first station, to the 4 needed for the rest of the trip.
    let d = cf2.duration(1.0, 4.0).unwrap();
    let mut only_first = base(vec![Stop {
        vertex: 2,
        path_index: 2,
        arrival_soc: 1.0,
        depart_soc: 4.0,
        duration: d,
        init_time: 0.0,
    }]);
    only_first.trip_time = 7.0 + d;
    let t = verify_itinerary(&g, &only_first, 4.0).unwrap();
    assert!(t > 9.0 + 1e-9, "{t}");
}

#[test]
fn verifier_rejects_inconsistent_records() {
    let g = two_station_path();
    let out = run(&g, 0, 7, 4.0, Config::default());
    let mut it = itinerary(&g, 0, &out);
    it.trip_time += 0.5;
    assert!(matches!(
        verify_itinerary(&g, &it, 4.0),
        Err(VerifyError::Mismatch { .. })
    ));
    let mut it = itinerary(&g, 0, &out);
    it.arcs.swap(0, 1);
    assert!(matches!(
        verify_itinerary(&g, &it, 4.0),
        Err(VerifyError::Discontinuous { .. })
    ));
    let mut it = itinerary(&g, 0, &out);
    it.stops[0].vertex = 3;
    it.stops[0].path_index = 3;
    assert!(verify_itinerary(&g, &it, 4.0).is_err());
}

#[test]
fn one_label_per_head_never_beats_the_exact_search() {
    let g = two_station_path();
    let exact = run(&g, 0, 7, 4.0, Config::default());
    let heu = run(
        &g,
        0,
        7,
        4.0,
        Config {
            one_label_per_head: true,
        },
    );
    if let Some(r) = heu.route {
        assert!(r.trip_time >= exact.route.unwrap().trip_time - 1e-9);
    }
}

// ---------------------------------------------------------------------------
// Random instances against exhaustive enumeration.

#[derive(Clone, Debug)]
struct Instance {
    graph: Graph,
    soc: f64,
}

const CAP: f64 = 10.0;

fn concave_curve() -> impl Strategy<Value = ChargingFunction> {
    (
        prop::collection::vec((1u32..4, 1u32..6), 1..4),
        0u32..2,
        prop::bool::weighted(0.15),
    )
        .prop_map(|(segs, init, swap)| {
            if swap {
                return ChargingFunction::swap(CAP, 1.0 + init as f64).unwrap();
            }
            let mut segs: Vec<(f64, f64)> = segs
                .into_iter()
                .map(|(dt, db)| (dt as f64, db as f64))
                .collect();
            segs.sort_by(|x, y| (y.1 / y.0).total_cmp(&(x.1 / x.0)));
            let mut pts = vec![(0.0, 0.0)];
            for (dt, db) in segs {
                let (t, b) = pts[pts.len() - 1];
                if b >= CAP {
                    break;
                }
                pts.push((t + dt, (b + db).min(CAP)));
            }
            ChargingFunction::curve(pts, init as f64, CAP).unwrap()
        })
}

fn instance() -> impl Strategy<Value = Instance> {
    (4usize..7).prop_flat_map(|n| {
        (
            prop::collection::vec((0..n as u32, 0..n as u32, 1u32..5, 0u32..6), n..3 * n),
            prop::collection::vec(0u32..5, n),
            prop::collection::vec(prop::option::weighted(0.4, concave_curve()), n),
            0u32..=10,
        )
            .prop_map(move |(raw, height, curves, soc)| {
                let arcs = raw
                    .into_iter()
                    .filter(|a| a.0 != a.1)
                    .map(|(u, v, d, c)| {
                        arc(
                            u,
                            v,
                            d as f64,
                            c as f64 + height[v as usize] as f64 - height[u as usize] as f64,
                        )
                    })
                    .collect();
                let stations = curves
                    .into_iter()
                    .enumerate()
                    .filter_map(|(v, cf)| {
                        cf.map(|cf| Station {
                            vertex: v as u32,
                            cf,
                        })
                    })
                    .collect();
                Instance {
                    graph: Graph::new(n, CAP, arcs, stations).unwrap(),
                    soc: soc as f64,
                }
            })
    })
}

/// Best trip time over walks of at most `depth` arcs with at most two stops,
/// charging durations restricted to multiples of `step`.
fn enumerate(
    g: &Graph,
    v: u32,
    t: u32,
    soc: f64,
    last: Option<u32>,
    depth: usize,
    stops: usize,
    step: f64,
) -> f64 {
    let mut best = if v == t { 0.0 } else { f64::INFINITY };
    if let (Some(st), true) = (g.station_at(v), stops > 0 && last != Some(v)) {
        let cf = &st.cf;
        if soc <= cf.alpha_max() + 1e-9 {
            let mut d = 0.0;
            loop {
                let b = cf.charge(soc, d);
                let rest = enumerate(g, v, t, b, Some(v), depth, stops - 1, step);
                best = best.min(d + cf.init_time() + rest);
                if b >= cf.alpha_max() - 1e-9 {
                    break;
                }
                d += step;
            }
        }
    }
    if depth == 0 {
        return best;
    }
    for id in g.out_ids(v) {
        let a = g.arc(id);
        let b = (soc - a.cons).min(CAP);
        if b < -1e-9 {
            continue;
        }
        best =
            best.min(a.drive + enumerate(g, a.head, t, b.max(0.0), None, depth - 1, stops, step));
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn routes_verify_and_beat_every_enumerated_walk(inst in instance(), s in 0u32..4, t in 0u32..4) {
        let g = &inst.graph;
        let out = run(g, s, t, inst.soc, Config::default());
        let brute = enumerate(g, s, t, inst.soc, None, 5, 2, 0.25);
        match &out.route {
            None => prop_assert!(brute.is_infinite(), "search found nothing, enumeration found {brute}"),
            Some(r) => {
                let it = Itinerary::from_route(g, s, r);
                let sim = verify_itinerary(g, &it, inst.soc);
                prop_assert!(sim.is_ok(), "{:?}", sim);
                prop_assert!(r.trip_time <= brute + 1e-7, "search {} > enumeration {}", r.trip_time, brute);
                prop_assert!(out.source_key <= r.trip_time + 1e-9);
            }
        }
        let heu = run(g, s, t, inst.soc, Config { one_label_per_head: true });
        if let (Some(h), Some(r)) = (&heu.route, &out.route) {
            prop_assert!(h.trip_time >= r.trip_time - 1e-7);
            let it = Itinerary::from_route(g, s, h);
            prop_assert!(verify_itinerary(g, &it, inst.soc).is_ok());
        }
    }

    /// Switching stations at a breakpoint of the SoC function, or not stopping
    /// at all, is never worse than switching at an arbitrary time.
    #[test]
    fn breakpoint_switching_dominates_arbitrary_switching(
        cf in concave_curve(),
        next in concave_curve(),
        cs in prop::collection::vec(-4i32..=6, 0..4),
        b in 0.0..1.0f64,
        extra in 0.0..1.0f64,
    ) {
        let p = cs.iter().fold(SocProfile::identity(CAP), |a, &c| a.link(&SocProfile::arc(c as f64, CAP)));
        let soc = b * cf.alpha_max();
        let tau = 1.0;
        let mut f = Vec::new();
        socfn::breakpoints(tau, soc, &cf, &p, &mut f);
        prop_assume!(!f.is_empty());
        let span = f[f.len() - 1].0 - f[0].0 + 1.0;
        let t_any = f[0].0 + extra * span;
        let y_any = socfn::eval(&f, t_any);
        prop_assume!(y_any <= next.alpha_max());
        let spawned: Vec<(f64, f64)> = f.iter().copied().filter(|p| p.1 <= next.alpha_max() + 1e-9).collect();
        for k in 0..200 {
            let t = t_any + k as f64 * 0.1;
            let want = next.charge(y_any, t - t_any);
            let got = spawned
                .iter()
                .filter(|p| p.0 <= t)
                .map(|p| next.charge(p.1, t - p.0))
                .fold(socfn::eval(&f, t), f64::max);
            prop_assert!(got >= want - 1e-7, "t={t}: best breakpoint {got} < arbitrary {want}");
        }
    }
}
