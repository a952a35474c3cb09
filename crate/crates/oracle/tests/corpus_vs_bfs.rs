// SPDX-License-Identifier: Apache-2.0

use lichk_core::corpus::{corpus_suite, source};
use lichk_core::engine::{check, EngineKind, EngineOptions, Verdict};
use lichk_core::pipeline::{build_check_model, CheckConfig};
use lichk_core::wrappers::{CheckModel, ModelKind};
use lichk_oracle::bfs::{min_bad_depth, BfsError};

fn engine(m: &CheckModel, kind: EngineKind, bound: usize) -> Verdict {
    check(m, &EngineOptions { kind, bound, ..Default::default() }).unwrap().verdict
}

fn narrowed(path: &str) -> String {
    source(path).unwrap().replace(": 4", ": 2")
}

#[test]
fn two_bit_adder_miters_match_product_bfs() {
    for (path, expect_bad) in
        [("adder_blocking.li", false), ("adder_nb_guarded.li", false), ("adder_nb_unguarded.li", true)]
    {
        let m = build_check_model(&narrowed(path), ModelKind::InvalidInput, &CheckConfig::default()).unwrap();
        assert_eq!(m.netlist.inputs().len(), 2 * (1 + 3 * 2) + 1);
        let bfs = min_bad_depth(&m.netlist, 1 << 20).unwrap();
        assert_eq!(bfs.min_bad_depth.is_some(), expect_bad, "{path}");
        match engine(&m, EngineKind::KInduction, 10) {
            Verdict::Proven { k } => {
                assert!(!expect_bad);
                assert!(k <= 10);
            }
            Verdict::Falsified { depth, .. } => assert_eq!(Some(depth), bfs.min_bad_depth, "{path}"),
            v => panic!("{path}: {v:?}"),
        }
    }
}

#[test]
fn producer_consumer_depths_match_bfs() {
    let buggy =
        build_check_model(source("producer_consumer_buggy.li").unwrap(), ModelKind::Deadlock, &CheckConfig::default())
            .unwrap();
    let bfs = min_bad_depth(&buggy.netlist, 1 << 16).unwrap().min_bad_depth.expect("deadlock reachable");
    let Verdict::Falsified { depth, .. } = engine(&buggy, EngineKind::Bmc, 20) else { panic!() };
    assert_eq!(depth, bfs);
    assert!(depth < 4);

    let fixed =
        build_check_model(source("producer_consumer_fixed.li").unwrap(), ModelKind::Deadlock, &CheckConfig::default())
            .unwrap();
    assert_eq!(min_bad_depth(&fixed.netlist, 1 << 16).unwrap().min_bad_depth, None);
    assert!(matches!(engine(&fixed, EngineKind::KInduction, 8), Verdict::Proven { k } if k <= 8));
}

/// Every fixture small enough for exhaustive search gets the same answer
/// from the search as from the engine.
#[test]
fn fixture_verdicts_match_bfs_where_feasible() {
    let mut compared = Vec::new();
    for f in corpus_suite() {
        let m = build_check_model(f.source(), f.check, &f.config).unwrap();
        // Wide miters are covered at reduced width above.
        if m.netlist.inputs().len() > 12 {
            continue;
        }
        let bfs = match min_bad_depth(&m.netlist, 1 << 18) {
            Ok(r) => r.min_bad_depth,
            Err(BfsError::TooManyInputs(_) | BfsError::TooManyStates(_)) => continue,
        };
        let v = check(&m, &EngineOptions { kind: f.engine, bound: f.bound, ..Default::default() }).unwrap().verdict;
        match v {
            Verdict::Falsified { depth, .. } => assert_eq!(Some(depth), bfs, "{}", f.name),
            Verdict::Proven { .. } => assert_eq!(bfs, None, "{}", f.name),
            Verdict::BoundReached { bound } => assert!(bfs.is_none_or(|d| d > bound), "{}", f.name),
        }
        compared.push(f.name);
    }
    for must in ["mismatched_depths_fix1", "mismatched_depths_initial", "router_v1", "circular_dependency_fix1"] {
        assert!(compared.iter().any(|n| n == must), "{must} was not compared: {compared:?}");
    }
}
