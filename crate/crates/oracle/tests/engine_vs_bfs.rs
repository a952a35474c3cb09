// SPDX-License-Identifier: Apache-2.0

use lichk_core::engine::{check, EngineKind, EngineOptions, Verdict};
use lichk_core::netlist::Simulator;
use lichk_core::wrappers::{CheckModel, ModelKind};
use lichk_oracle::bfs::min_bad_depth;
use lichk_oracle::eval::{lit, Evaluator};
use lichk_oracle::gen::{random_netlist, NetlistParams};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BOUND: usize = 64;

fn run(m: &CheckModel, kind: EngineKind, bound: usize, strengthen: bool) -> Verdict {
    check(m, &EngineOptions { kind, bound, strengthen, ..Default::default() }).unwrap().verdict
}

#[test]
fn bmc_matches_bfs_on_random_designs() {
    let mut rng = StdRng::seed_from_u64(2024);
    let (mut hits, mut safe) = (0, 0);
    for i in 0..150 {
        let n = random_netlist(&mut rng, &NetlistParams::default());
        assert!(n.latches().len() <= 16 && n.num_ands() <= 200);
        let expected = min_bad_depth(&n, 1 << 17).unwrap().min_bad_depth;
        let m = CheckModel::from_netlist(n, ModelKind::Deadlock);
        let strengthen = i % 2 == 0;
        match (run(&m, EngineKind::Bmc, BOUND, strengthen), expected) {
            (Verdict::Falsified { depth, trace, .. }, Some(d)) => {
                assert_eq!(depth, d, "design {i}");
                assert!(trace.replay(&m.netlist).unwrap().is_counterexample());
                hits += 1;
            }
            (Verdict::BoundReached { .. }, None) => safe += 1,
            (Verdict::BoundReached { .. }, Some(d)) => assert!(d > BOUND, "design {i}: bfs depth {d}"),
            (v, e) => panic!("design {i}: engine {v:?}, bfs {e:?}"),
        }
    }
    assert!(hits >= 30 && safe >= 10, "unbalanced sample: {hits} falsified, {safe} safe");
}

#[test]
fn k_induction_agrees_with_bfs() {
    let mut rng = StdRng::seed_from_u64(77);
    let mut proven = 0;
    for i in 0..120 {
        let n = random_netlist(&mut rng, &NetlistParams { max_latches: 10, max_gates: 80, ..Default::default() });
        let expected = min_bad_depth(&n, 1 << 12).unwrap().min_bad_depth;
        let m = CheckModel::from_netlist(n, ModelKind::Deadlock);
        for strengthen in [false, true] {
            match run(&m, EngineKind::KInduction, 24, strengthen) {
                Verdict::Proven { .. } => {
                    assert_eq!(expected, None, "design {i}: proven but bfs reaches a bad");
                    proven += 1;
                }
                Verdict::Falsified { depth, .. } => assert_eq!(Some(depth), expected, "design {i}"),
                Verdict::BoundReached { .. } => assert!(expected.is_none_or(|d| d > 24), "design {i}"),
            }
        }
    }
    assert!(proven >= 20, "only {proven} proofs");
}

#[test]
fn simulator_and_parallel_evaluator_agree() {
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..50 {
        let n = random_netlist(&mut rng, &NetlistParams::default());
        let ev = Evaluator::new(&n);
        let mut sim = Simulator::new(&n).unwrap();
        let mut latches: Vec<u64> = sim.state().latch_values.iter().map(|&b| b as u64).collect();
        for _ in 0..30 {
            let ins: Vec<bool> = (0..n.inputs().len()).map(|_| rng.gen()).collect();
            let w = ev.eval(&latches, &ins.iter().map(|&b| b as u64).collect::<Vec<_>>());
            sim.step(&ins);
            for (i, &v) in sim.values().iter().enumerate() {
                assert_eq!(v, w[i] & 1 == 1, "node {i}");
            }
            latches = n.latches().iter().map(|&l| lit(&w, n.latch_next(l).unwrap()) & 1).collect();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Counterexamples are minimal: one bound short of the found depth
    /// yields no counterexample.
    #[test]
    fn counterexamples_are_minimal(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = random_netlist(&mut rng, &NetlistParams { max_latches: 8, max_gates: 60, ..Default::default() });
        let m = CheckModel::from_netlist(n, ModelKind::Deadlock);
        if let Verdict::Falsified { depth, .. } = run(&m, EngineKind::Bmc, 32, true) {
            if depth > 0 {
                let shorter = run(&m, EngineKind::Bmc, depth - 1, false);
                prop_assert_eq!(shorter, Verdict::BoundReached { bound: depth - 1 });
            }
            let longer = run(&m, EngineKind::Bmc, depth + 7, false);
            let same_depth = matches!(longer, Verdict::Falsified { depth: d, .. } if d == depth);
            prop_assert!(same_depth);
        }
    }
}
