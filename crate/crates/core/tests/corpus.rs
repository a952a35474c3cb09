// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use lichk_core::corpus::{corpus_suite, design_names, source, Expected};
use lichk_core::engine::{check, EngineOptions, Verdict};
use lichk_core::pipeline::build_check_model;

#[test]
fn every_fixture_meets_its_expectation() {
    for f in corpus_suite() {
        let start = Instant::now();
        let m = build_check_model(f.source(), f.check, &f.config).unwrap_or_else(|e| panic!("{}: {e}", f.name));
        let opts = EngineOptions {
            kind: f.engine,
            bound: f.bound,
            timeout: Some(Duration::from_secs(f.budget_secs)),
            ..Default::default()
        };
        let r = check(&m, &opts).unwrap_or_else(|e| panic!("{}: {e}", f.name));
        match (&r.verdict, f.expected) {
            (Verdict::Falsified { depth, trace, .. }, Expected::Falsified) => {
                if let Some(max) = f.max_depth {
                    assert!(*depth <= max, "{}: depth {depth} > {max}", f.name);
                }
                assert!(trace.replay(&m.netlist).unwrap().is_counterexample(), "{}", f.name);
            }
            (Verdict::Proven { .. }, Expected::Proven) => {}
            (Verdict::BoundReached { bound }, Expected::BoundReached) => assert_eq!(*bound, f.bound),
            (v, e) => panic!("{}: expected {e:?}, got {v:?}", f.name),
        }
        assert!(start.elapsed() < Duration::from_secs(f.budget_secs), "{}: over budget", f.name);
    }
}

#[test]
fn manifest_covers_every_bundled_design() {
    let used: BTreeSet<String> = corpus_suite().into_iter().map(|f| f.path).collect();
    let bundled: BTreeSet<String> = design_names().map(str::to_string).collect();
    assert_eq!(used, bundled);
    let on_disk: BTreeSet<String> = std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
        .unwrap()
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".li"))
        .collect();
    assert_eq!(bundled, on_disk);
}

fn code_lines(text: &str) -> Vec<&str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with("//")).collect()
}

/// Lines removed plus lines added, comments and indentation ignored.
fn edit_size(a: &str, b: &str) -> usize {
    let (a, b) = (code_lines(a), code_lines(b));
    let mut lcs = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in (0..a.len()).rev() {
        for j in (0..b.len()).rev() {
            lcs[i][j] = if a[i] == b[j] { lcs[i + 1][j + 1] + 1 } else { lcs[i + 1][j].max(lcs[i][j + 1]) };
        }
    }
    a.len() + b.len() - 2 * lcs[0][0]
}

#[test]
fn buggy_and_fixed_versions_differ_by_small_edits() {
    let pairs = [
        ("adder_nb_guarded.li", "adder_nb_unguarded.li"),
        ("producer_consumer_buggy.li", "producer_consumer_fixed.li"),
        ("unconstrained_input_initial.li", "unconstrained_input_fix1.li"),
        ("under_constrained_read_initial.li", "under_constrained_read_fix1.li"),
        ("under_constrained_read_fix1.li", "under_constrained_read_fix2.li"),
        ("out_of_order_push_initial.li", "out_of_order_push_fix1.li"),
        ("out_of_order_push_fix1.li", "out_of_order_push_fix2.li"),
        ("circular_dependency_initial.li", "circular_dependency_fix1.li"),
        ("mismatched_depths_initial.li", "mismatched_depths_fix1.li"),
        ("router_v1.li", "router_v2.li"),
    ];
    for (a, b) in pairs {
        let n = edit_size(source(a).unwrap(), source(b).unwrap());
        assert!(n > 0 && n <= 10, "{a} -> {b}: {n} lines");
    }
}
