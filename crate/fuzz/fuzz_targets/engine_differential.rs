//! Differential target: on any parseable pattern and query, the dynamic
//! program and the clustered engine (both space modes) must produce the
//! same match graph.

#![no_main]

use libfuzzer_sys::fuzz_target;
use xregex::classic_dp::dp_node_graph;
use xregex::engine::{clustered_root_graph, SpaceMode};
use xregex::simulate::ThompsonSimulator;
use xregex::syntax::parse;

fuzz_target!(|data: &[u8]| {
    let split = data.iter().position(|&b| b == 0).unwrap_or(data.len());
    let (pattern_bytes, rest) = data.split_at(split);
    let query = rest.get(1..).unwrap_or(&[]);
    // keep a single input cheap enough for high throughput
    if pattern_bytes.len() > 64 || query.len() > 24 {
        return;
    }
    let Ok(pattern) = std::str::from_utf8(pattern_bytes) else {
        return;
    };
    let Ok(ast) = parse(pattern) else {
        return;
    };
    let want = dp_node_graph(&ast, ast.root(), query);
    for mode in [SpaceMode::NaiveBottomUp, SpaceMode::HeavyPath] {
        let (g, stats) = clustered_root_graph(&ast, query, &ThompsonSimulator, mode);
        assert_eq!(g, want, "{pattern:?} on {query:?} ({mode:?})");
        let k = ast.count_extended();
        if k > 0 {
            assert!(stats.ell <= 4 * k - 1, "cluster count bound");
        }
    }
});
