//! Writes the validation corpus shipped in `corpus/`: small random instances,
//! their queries and the recorded trip times.
//!
//! Usage: `cargo run -p evr-bench --example make_corpus -- <dir> [count]`

use evr_bench::commands::{expected_text, instance_text, queries_text};
use evr_oracle::{random_instance, validate_instance, CorpusParams};
use std::path::PathBuf;

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().expect("usage: make_corpus <dir> [count]"));
    let count: u64 = args
        .next()
        .map_or(12, |c| c.parse().expect("count is a number"));
    std::fs::create_dir_all(&dir).expect("create corpus directory");
    let params = CorpusParams {
        max_vertices: 30,
        ..CorpusParams::default()
    };
    for seed in 0..count {
        let (inst, queries) = random_instance(seed, &params);
        let g = inst.to_graph().expect("corpus instance is valid");
        let report = validate_instance(&g, &queries, g.capacity() / 400.0).expect("reference runs");
        assert!(
            report.passed(),
            "instance {seed} fails validation: {:?}",
            report.violations
        );
        let name = format!("random-{seed:03}");
        std::fs::write(dir.join(format!("{name}.ev")), instance_text(&inst))
            .expect("write instance");
        std::fs::write(dir.join(format!("{name}.q")), queries_text(&queries))
            .expect("write queries");
        std::fs::write(dir.join(format!("{name}.expected")), expected_text(&report))
            .expect("write results");
    }
}
