use evr_cfp::{cfp_query, Config, Itinerary};
use evr_model::{Arc, Graph, ZeroPotential};
use evr_oracle::{bsp_reference, BspError};
use proptest::prelude::*;

/// Minimum time over all simple paths whose consumption fits the budget.
fn enumerate(g: &Graph, s: u32, t: u32, budget: f64) -> Option<f64> {
    fn go(
        g: &Graph,
        v: u32,
        t: u32,
        time: f64,
        left: f64,
        on: &mut Vec<bool>,
        best: &mut Option<f64>,
    ) {
        if v == t {
            *best = Some(best.map_or(time, |b: f64| b.min(time)));
            return;
        }
        for id in g.out_ids(v) {
            let a = g.arc(id);
            if !on[a.head as usize] && a.cons <= left + 1e-9 {
                on[a.head as usize] = true;
                go(g, a.head, t, time + a.drive, left - a.cons, on, best);
                on[a.head as usize] = false;
            }
        }
    }
    let mut on = vec![false; g.num_vertices()];
    on[s as usize] = true;
    let mut best = None;
    go(g, s, t, 0.0, budget, &mut on, &mut best);
    best
}

fn graph() -> impl Strategy<Value = Graph> {
    (2usize..8).prop_flat_map(|n| {
        let arc =
            (0..n as u32, 1..n as u32, 1u32..20, 0u32..12).prop_map(move |(u, off, d, c)| Arc {
                tail: u,
                head: (u + off) % n as u32,
                drive: d as f64,
                cons: c as f64,
            });
        proptest::collection::vec(arc, 0..20)
            .prop_map(move |arcs| Graph::new(n, 30.0, arcs, vec![]).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_simple_path_enumeration(g in graph(), s in 0u32..8, t in 0u32..8, budget in 0u32..31) {
        let n = g.num_vertices() as u32;
        let (s, t, b) = (s % n, t % n, budget as f64);
        prop_assert_eq!(bsp_reference(&g, s, t, b).unwrap(), enumerate(&g, s, t, b));
    }

    #[test]
    fn station_free_search_equals_the_reference(g in graph(), s in 0u32..8, t in 0u32..8, budget in 0u32..31) {
        let n = g.num_vertices() as u32;
        let (s, t, b) = (s % n, t % n, budget as f64);
        let out = cfp_query(&g, &g, &mut ZeroPotential, s, t, b, Config::default()).unwrap();
        let got = out.route.map(|r| Itinerary::from_route(&g, s, &r).trip_time);
        let want = bsp_reference(&g, s, t, b).unwrap();
        match (got, want) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-9, "{} vs {}", x, y),
            (x, y) => prop_assert_eq!(x, y),
        }
    }
}

#[test]
fn negative_arcs_are_refused() {
    let g = Graph::new(
        2,
        10.0,
        vec![Arc {
            tail: 0,
            head: 1,
            drive: 1.0,
            cons: -1.0,
        }],
        vec![],
    )
    .unwrap();
    assert_eq!(bsp_reference(&g, 0, 1, 5.0), Err(BspError::NegativeArc(0)));
}
