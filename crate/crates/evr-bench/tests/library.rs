use evr_bench::commands::{rank_csv, run_batch, RankRow, Solver};
use evr_bench::experiment::{csv_header, Comparison, AGREEMENT_TOL};
use evr_io::{Instance, Query};
use proptest::prelude::*;
use std::path::Path;

fn corpus_graph(name: &str) -> evr_model::Graph {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name);
    Instance::parse(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_graph()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Parallel batches return results in input order, equal to one-by-one solving.
    #[test]
    fn batch_results_follow_input_order(
        raw in prop::collection::vec((0u32..30, 0u32..30, 0.0..1.0f64), 0..25),
        threads in 1usize..4,
    ) {
        let g = corpus_graph("random-001.ev");
        let n = g.num_vertices() as u32;
        let queries: Vec<Query> = raw
            .iter()
            .map(|&(s, t, f)| Query { source: s % n, target: t % n, soc: f * g.capacity() })
            .collect();
        let solver = Solver::Plain(&g);
        let batch = run_batch(&solver, &queries, Some(threads)).unwrap();
        prop_assert_eq!(batch.len(), queries.len());
        for (q, b) in queries.iter().zip(&batch) {
            let (it, stats) = solver.solve(q).unwrap();
            prop_assert_eq!(b.itinerary.as_ref().map(|i| i.trip_time), it.map(|i| i.trip_time));
            prop_assert_eq!(b.stats.labels_settled, stats.labels_settled);
        }
    }
}

#[test]
fn rank_csv_marks_missing_values() {
    let row = RankRow {
        rank_log: 3,
        queries: 2,
        feasible: 0,
        median_runtime_ms: 1.5,
        median_trip_time_s: f64::NAN,
        mean_drive_time_s: f64::NAN,
        mean_charge_time_s: f64::NAN,
        median_labels_settled: 4.0,
    };
    let text = rank_csv(std::slice::from_ref(&row), true);
    assert_eq!(
        text.lines().nth(2),
        Some("3,8,2,0,1.500000,NA,NA,NA,4.000000")
    );
    let text = rank_csv(&[row], false);
    assert_eq!(text.lines().nth(2), Some("3,8,2,0,NA,NA,NA,NA,4.000000"));
}

#[test]
fn comparison_flags_feasibility_disagreement_and_large_gaps() {
    let q = Query {
        source: 0,
        target: 1,
        soc: 1.0,
    };
    let mk = |t: [Option<f64>; 4]| Comparison {
        query: q,
        trip_time: t,
        labels_settled: [0; 4],
        runtime_ms: [0.0; 4],
        stops: 0,
    };
    assert!(mk([None; 4]).agrees());
    assert!(mk([
        Some(5.0),
        Some(5.0 + AGREEMENT_TOL / 2.0),
        Some(5.0),
        Some(5.0)
    ])
    .agrees());
    assert!(!mk([Some(5.0), Some(5.0 + 1e-6), Some(5.0), Some(5.0)]).agrees());
    assert_eq!(
        mk([Some(5.0), None, Some(5.0), Some(5.0)]).max_diff(),
        f64::INFINITY
    );
    assert!(csv_header().starts_with("# evr-experiment/1\n"));
}
