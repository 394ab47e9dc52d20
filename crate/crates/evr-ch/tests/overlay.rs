mod common;

use common::{curve, grid_graph, rng};
use evr_cfp::{cfp_query, verify_itinerary, Config, SearchGraph};
use evr_ch::{
    preprocess, ChConfig, Contraction, FormatError, Origin, Overlay, QueryGraph, TargetArcs,
    CORE_RANK,
};
use evr_model::{Arc, Graph, SocProfile, Station, ZeroPotential};
use rand::Rng;

const CAP: f64 = 300.0;

fn arc(tail: u32, head: u32, drive: f64, cons: f64) -> Arc {
    Arc {
        tail,
        head,
        drive,
        cons,
    }
}

fn station(v: u32, cap: f64) -> Station {
    Station {
        vertex: v,
        cf: curve(&mut rng(v as u64), cap),
    }
}

/// Trip time from `s` to `t` (original ids) through the overlay, with the
/// itinerary checked on the original graph.
fn overlay_query(ov: &Overlay, g: &Graph, s: u32, t: u32, soc: f64) -> Option<f64> {
    let (si, ti) = (ov.to_internal(s), ov.to_internal(t));
    let targets = TargetArcs::build(ov, ti);
    let qg = QueryGraph {
        overlay: ov,
        targets: &targets,
    };
    let out = cfp_query(
        ov.graph(),
        &qg,
        &mut ZeroPotential,
        si,
        ti,
        soc,
        Config::default(),
    )
    .unwrap();
    let route = out.route?;
    let it = ov.original_itinerary(si, &qg.expand(&route));
    assert_eq!(it.path.first(), Some(&s));
    assert_eq!(it.path.last(), Some(&t));
    let simulated = verify_itinerary(g, &it, soc).expect("overlay itinerary verifies");
    assert!((simulated - route.trip_time).abs() <= 1e-9 * route.trip_time.max(1.0));
    Some(route.trip_time)
}

fn plain_query(g: &Graph, s: u32, t: u32, soc: f64) -> Option<f64> {
    let out = cfp_query(g, g, &mut ZeroPotential, s, t, soc, Config::default()).unwrap();
    out.route.map(|r| r.trip_time)
}

#[test]
fn stations_are_never_contracted() {
    let arcs = vec![
        arc(0, 1, 1.0, 1.0),
        arc(1, 2, 1.0, 1.0),
        arc(2, 0, 1.0, 1.0),
    ];
    let g = Graph::new(3, 10.0, arcs, (0..3).map(|v| station(v, 10.0)).collect()).unwrap();
    let ov = preprocess(&g, ChConfig::default());
    assert_eq!(ov.core_size(), 3);
    assert_eq!(ov.num_shortcuts(), 0);
    assert_eq!(ov.overlay_arc_ids().len(), 3);
}

#[test]
fn contracting_a_path_vertex_links_its_arcs() {
    // 0 and 2 are stations, so only 1 can be contracted.
    let arcs = vec![
        arc(0, 1, 3.0, 2.0),
        arc(1, 2, 4.0, -1.0),
        arc(2, 1, 4.0, 1.0),
        arc(1, 0, 3.0, -2.0),
    ];
    let g = Graph::new(3, 4.0, arcs, vec![station(0, 4.0), station(2, 4.0)]).unwrap();
    let ov = preprocess(&g, ChConfig::default());
    assert_eq!(ov.core_size(), 2);
    assert_eq!(ov.num_shortcuts(), 2);
    let (a, c) = (ov.to_internal(0), ov.to_internal(2));
    let forward: Vec<_> = ov.core_out(a).iter().map(|&id| *ov.arc(id)).collect();
    assert_eq!(forward.len(), 1);
    assert_eq!(forward[0].head, c);
    assert_eq!(forward[0].drive, 7.0);
    let linked = SocProfile::arc(2.0, 4.0).link(&SocProfile::arc(-1.0, 4.0));
    assert_eq!(forward[0].profile, linked);
    assert!(matches!(forward[0].origin, Origin::Shortcut(..)));
}

#[test]
fn a_dominating_direct_arc_is_a_witness() {
    let arcs = vec![
        arc(0, 1, 3.0, 2.0),
        arc(1, 2, 4.0, 2.0),
        arc(0, 2, 6.0, 3.0),
        arc(2, 1, 4.0, 2.0),
        arc(1, 0, 3.0, 2.0),
        arc(2, 0, 6.0, 3.0),
    ];
    let g = Graph::new(3, 10.0, arcs, vec![station(0, 10.0), station(2, 10.0)]).unwrap();
    let ov = preprocess(&g, ChConfig::default());
    assert_eq!(ov.core_size(), 2);
    assert_eq!(ov.num_shortcuts(), 0);
}

#[test]
fn a_faster_but_costlier_direct_arc_is_no_witness() {
    // The direct arc is faster but uses more energy: both stay.
    let arcs = vec![
        arc(0, 1, 3.0, 2.0),
        arc(1, 2, 4.0, 2.0),
        arc(0, 2, 6.0, 5.0),
    ];
    let g = Graph::new(3, 10.0, arcs, vec![station(0, 10.0), station(2, 10.0)]).unwrap();
    let ov = preprocess(&g, ChConfig::default());
    assert_eq!(ov.num_shortcuts(), 1);
    assert_eq!(ov.core_out(ov.to_internal(0)).len(), 2);
}

#[test]
fn priority_terms_of_isolated_and_chain_vertices() {
    let arcs = vec![arc(0, 1, 1.0, 1.0), arc(1, 2, 1.0, 1.0)];
    let g = Graph::new(4, 10.0, arcs, vec![]).unwrap();
    let mut c = Contraction::new(&g, ChConfig::default());
    let isolated = c.priority(3);
    assert_eq!((isolated.ed, isolated.dn, isolated.cq), (0, 0, 0));
    let chain = c.priority(1);
    assert_eq!(chain.ed, 1 - 2);
    assert!(chain.value() < isolated.value());
}

#[test]
fn structure_invariants_hold_on_random_grids() {
    for seed in 0..5 {
        let mut r = rng(seed);
        let g = grid_graph(&mut r, 20, CAP, 0.03);
        let cfg = ChConfig {
            core_degree: [4.0, 8.0, 32.0][seed as usize % 3],
            ..ChConfig::default()
        };
        let ov = preprocess(&g, cfg);
        for st in g.stations() {
            assert!(ov.is_core(ov.to_internal(st.vertex)));
        }
        for v in 0..ov.num_vertices() as u32 {
            assert_eq!(ov.is_core(v), ov.rank(v) == CORE_RANK);
            for &id in ov.up_out(v) {
                let a = ov.arc(id);
                assert_eq!(a.tail, v);
                assert!(ov.rank(a.head) > ov.rank(v));
            }
            for &id in ov.down_in(v) {
                let a = ov.arc(id);
                assert_eq!(a.head, v);
                assert!(ov.rank(a.tail) > ov.rank(v));
            }
            for &id in ov.core_out(v) {
                assert!(ov.is_core(ov.arc(id).head));
            }
        }
        assert!(ov.core_average_degree() <= cfg.core_degree + 1e-12);
        // Shortcut data equals the linked chain of base arcs it unpacks to.
        for id in ov.overlay_arc_ids() {
            let a = ov.arc(id);
            let mut base = Vec::new();
            ov.unpack(id, &mut base);
            let mut profile = SocProfile::identity(CAP);
            let mut drive = 0.0;
            let mut at = a.tail;
            for &b in &base {
                let x = ov.graph().arc(b);
                assert_eq!(x.tail, at);
                at = x.head;
                drive += x.drive;
                profile = profile.link(ov.graph().profile(b));
            }
            assert_eq!(at, a.head);
            assert_eq!(drive, a.drive);
            assert_eq!(profile, a.profile, "arc {id}");
        }
    }
}

#[test]
fn overlay_queries_equal_plain_search() {
    let mut r = rng(42);
    let g = grid_graph(&mut r, 32, CAP, 0.03);
    let ov = preprocess(&g, ChConfig::default());
    assert!(
        ov.core_size() < g.num_vertices() / 2,
        "core {}",
        ov.core_size()
    );
    let mut feasible = 0;
    for _ in 0..100 {
        let s = r.gen_range(0..g.num_vertices() as u32);
        let t = r.gen_range(0..g.num_vertices() as u32);
        let soc = r.gen_range(0.0..=CAP);
        let plain = plain_query(&g, s, t, soc);
        let fast = overlay_query(&ov, &g, s, t, soc);
        match (plain, fast) {
            (Some(a), Some(b)) => {
                assert!((a - b).abs() <= 1e-9, "{s}->{t} at {soc}: {a} vs {b}");
                feasible += 1;
            }
            (None, None) => {}
            other => panic!("{s}->{t} at {soc}: {other:?}"),
        }
    }
    assert!(feasible >= 50, "only {feasible} feasible queries");
}

#[test]
fn same_input_gives_identical_overlays() {
    let g = grid_graph(&mut rng(9), 16, CAP, 0.05);
    let bytes = |ov: &Overlay| {
        let mut buf = Vec::new();
        ov.write_binary(&mut buf).unwrap();
        buf
    };
    let a = preprocess(&g, ChConfig::default());
    let b = preprocess(&g, ChConfig::default());
    assert_eq!(bytes(&a), bytes(&b));
}

#[test]
fn binary_round_trip_preserves_the_overlay() {
    let mut r = rng(5);
    let g = grid_graph(&mut r, 16, CAP, 0.05);
    let ov = preprocess(&g, ChConfig::default());
    let mut buf = Vec::new();
    ov.write_binary(&mut buf).unwrap();
    let back = Overlay::read_binary(&buf[..], &g).unwrap();
    assert_eq!(back.text_dump(), ov.text_dump());
    let mut again = Vec::new();
    back.write_binary(&mut again).unwrap();
    assert_eq!(again, buf);
    for _ in 0..20 {
        let s = r.gen_range(0..256);
        let t = r.gen_range(0..256);
        assert_eq!(
            overlay_query(&back, &g, s, t, CAP),
            overlay_query(&ov, &g, s, t, CAP)
        );
    }
}

#[test]
fn reading_rejects_foreign_or_damaged_files() {
    let g = grid_graph(&mut rng(5), 8, CAP, 0.05);
    let other = grid_graph(&mut rng(6), 9, CAP, 0.05);
    let mut buf = Vec::new();
    preprocess(&g, ChConfig::default())
        .write_binary(&mut buf)
        .unwrap();
    assert!(matches!(
        Overlay::read_binary(&buf[..], &other),
        Err(FormatError::Mismatch(_))
    ));
    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(matches!(
        Overlay::read_binary(&bad[..], &g),
        Err(FormatError::BadMagic)
    ));
    assert!(Overlay::read_binary(&buf[..buf.len() - 3], &g).is_err());
    let mut bad = buf.clone();
    bad[8] = 9;
    assert!(matches!(
        Overlay::read_binary(&bad[..], &g),
        Err(FormatError::Version(9))
    ));
}

#[test]
fn text_dump_lists_every_vertex_and_overlay_arc() {
    let g = grid_graph(&mut rng(3), 6, CAP, 0.1);
    let ov = preprocess(&g, ChConfig::default());
    let dump = ov.text_dump();
    assert!(dump.starts_with("overlay v1 n 36"));
    assert_eq!(dump.lines().filter(|l| l.starts_with("v ")).count(), 36);
    assert_eq!(
        dump.lines().filter(|l| l.starts_with("a ")).count(),
        ov.overlay_arc_ids().len()
    );
}

#[test]
fn lower_degree_threshold_leaves_a_larger_core() {
    let g = grid_graph(&mut rng(11), 24, CAP, 0.02);
    let small = preprocess(
        &g,
        ChConfig {
            core_degree: 3.5,
            ..ChConfig::default()
        },
    );
    let large = preprocess(&g, ChConfig::default());
    assert!(small.core_size() > large.core_size());
}

#[test]
fn aggressive_overlays_keep_one_arc_per_pair() {
    let mut r = rng(21);
    let g = grid_graph(&mut r, 24, CAP, 0.03);
    let regular = preprocess(&g, ChConfig::default());
    let aggressive = preprocess(
        &g,
        ChConfig {
            aggressive: true,
            ..ChConfig::default()
        },
    );
    assert!(aggressive.is_aggressive());
    assert!(aggressive.num_shortcuts() <= regular.num_shortcuts());
    for v in 0..aggressive.num_vertices() as u32 {
        let mut arcs = Vec::new();
        aggressive.out_arcs(v, &mut arcs);
        let shortcut_heads: Vec<u32> = arcs
            .iter()
            .filter(|a| matches!(aggressive.arc(a.id).origin, Origin::Shortcut(..)))
            .map(|a| a.head)
            .collect();
        let mut dedup = shortcut_heads.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), shortcut_heads.len());
    }
    // Inexact, but every route it finds is real and no faster than optimal.
    for _ in 0..40 {
        let s = r.gen_range(0..576);
        let t = r.gen_range(0..576);
        if let (Some(exact), Some(heu)) = (
            plain_query(&g, s, t, CAP),
            overlay_query(&aggressive, &g, s, t, CAP),
        ) {
            assert!(heu >= exact - 1e-9);
        }
    }
}

#[test]
fn rebinding_to_new_charging_functions_keeps_queries_exact() {
    let g = grid_graph(&mut rng(12), 10, CAP, 0.08);
    let ov = preprocess(&g, ChConfig::default());
    let mut r = rng(13);
    let restations: Vec<Station> = g
        .stations()
        .iter()
        .map(|st| Station {
            vertex: st.vertex,
            cf: curve(&mut r, CAP),
        })
        .collect();
    let g2 = Graph::new(g.num_vertices(), CAP, g.arcs().to_vec(), restations).unwrap();
    let ov2 = ov.rebind(&g2).unwrap();
    for _ in 0..40 {
        let (s, t) = (r.gen_range(0..100), r.gen_range(0..100));
        let soc = r.gen_range(0.0..CAP);
        let plain = cfp_query(&g2, &g2, &mut ZeroPotential, s, t, soc, Config::default())
            .unwrap()
            .route
            .map(|x| evr_cfp::Itinerary::from_route(&g2, s, &x).trip_time);
        let via = overlay_query(&ov2, &g2, s, t, soc);
        match (plain, via) {
            (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-9, "{s}->{t}: {a} vs {b}"),
            (a, b) => assert_eq!(a, b),
        }
    }

    // A station on a contracted vertex cannot be served.
    let outside = (0..100u32)
        .find(|&v| !ov.is_core(ov.to_internal(v)))
        .unwrap();
    let mut sts = g.stations().to_vec();
    sts.push(station(outside, CAP));
    let g3 = Graph::new(g.num_vertices(), CAP, g.arcs().to_vec(), sts).unwrap();
    assert!(matches!(ov.rebind(&g3), Err(FormatError::Mismatch(_))));

    // Same arc count, different arcs.
    let mut arcs = g.arcs().to_vec();
    arcs[0].drive += 1.0;
    let g4 = Graph::new(g.num_vertices(), CAP, arcs, g.stations().to_vec()).unwrap();
    assert!(matches!(ov.rebind(&g4), Err(FormatError::Mismatch(_))));
}
