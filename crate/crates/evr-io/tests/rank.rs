use evr_io::{dijkstra_order, generate_rank_queries, generate_synthetic, GenParams, RankError};
use evr_model::{Arc, Graph};

fn line(n: u32) -> Graph {
    let arcs = (0..n - 1)
        .map(|i| Arc {
            tail: i,
            head: i + 1,
            drive: 1.0,
            cons: 0.0,
        })
        .collect();
    Graph::new(n as usize, 10.0, arcs, vec![]).unwrap()
}

#[test]
fn order_starts_at_the_source_and_breaks_ties_by_id() {
    let arcs = vec![
        Arc {
            tail: 0,
            head: 3,
            drive: 1.0,
            cons: 0.0,
        },
        Arc {
            tail: 0,
            head: 1,
            drive: 1.0,
            cons: 0.0,
        },
        Arc {
            tail: 0,
            head: 2,
            drive: 0.5,
            cons: 0.0,
        },
    ];
    let g = Graph::new(5, 10.0, arcs, vec![]).unwrap();
    assert_eq!(dijkstra_order(&g, 0), vec![0, 2, 1, 3]);
    assert_eq!(dijkstra_order(&g, 4), vec![4]);
}

#[test]
fn rank_one_is_the_first_extraction_after_the_source() {
    let g = generate_synthetic(&GenParams {
        n: 2000,
        seed: 4,
        ..GenParams::default()
    })
    .to_graph()
    .unwrap();
    let qs = generate_rank_queries(&g, 11, 10, 5, 8000.0).unwrap();
    assert_eq!(qs.len(), 5 * 11);
    for q in &qs {
        let order = dijkstra_order(&g, q.source);
        assert_eq!(q.target, order[1 << q.rank_log]);
        if q.rank_log == 0 {
            assert_eq!(q.target, order[1]);
        }
        assert_eq!(q.soc, 8000.0);
    }
}

#[test]
fn fixed_seed_gives_identical_queries() {
    let g = generate_synthetic(&GenParams {
        n: 1000,
        seed: 2,
        ..GenParams::default()
    })
    .to_graph()
    .unwrap();
    assert_eq!(
        generate_rank_queries(&g, 5, 8, 10, 100.0).unwrap(),
        generate_rank_queries(&g, 5, 8, 10, 100.0).unwrap()
    );
}

#[test]
fn rank_beyond_the_reachable_set_is_an_error() {
    let g = line(10);
    // From vertex v, 9 - v further vertices are reachable; rank 16 never is.
    assert_eq!(
        generate_rank_queries(&g, 1, 4, 1, 5.0),
        Err(RankError {
            rank: 16,
            reachable: 9
        })
    );
    // Rank 8 needs source 0 or 1; redraws find one.
    let qs = generate_rank_queries(&g, 1, 3, 1, 5.0).unwrap();
    let s = qs[0].source;
    assert!(s <= 1);
    assert_eq!(
        qs.iter().map(|q| q.target).collect::<Vec<_>>(),
        vec![s + 1, s + 2, s + 4, s + 8]
    );
}

#[test]
fn random_queries_are_in_range_and_seeded() {
    let a = evr_io::random_queries(37, 500, 12.5, 9);
    assert_eq!(a.len(), 500);
    assert!(a
        .iter()
        .all(|q| q.source < 37 && q.target < 37 && q.soc == 12.5));
    assert_eq!(a, evr_io::random_queries(37, 500, 12.5, 9));
    assert_ne!(a, evr_io::random_queries(37, 500, 12.5, 10));
}
