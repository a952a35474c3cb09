// SPDX-License-Identifier: Apache-2.0

use lichk_core::corpus::corpus_suite;
use lichk_core::elab::elaborate;
use lichk_core::engine::{check, EngineKind, EngineOptions, Verdict};
use lichk_core::lang::parse;
use lichk_core::netlist::Netlist;
use lichk_core::pipeline::build_model;
use lichk_core::wrappers::{build_invalid_input_model, CheckModel, InvalidInputOptions, ModelKind};
use lichk_oracle::bfs::min_bad_depth;
use lichk_oracle::gen::{random_netlist, NetlistParams};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn bmc(m: &CheckModel, bound: usize) -> Verdict {
    check(m, &EngineOptions { kind: EngineKind::Bmc, bound, ..Default::default() }).unwrap().verdict
}

/// Cutting a netlist down to the cone of one bad (plus the constraints)
/// keeps that bad's reachability and minimal depth.
#[test]
fn cone_of_influence_preserves_each_bad() {
    let mut rng = StdRng::seed_from_u64(31);
    for i in 0..60 {
        let n = random_netlist(&mut rng, &NetlistParams { max_latches: 12, ..Default::default() });
        for (name, b) in n.bads().to_vec() {
            let mut roots = vec![b];
            roots.extend_from_slice(n.constraints());
            let (cone, map) = n.cone_with_map(&roots).unwrap();
            assert!(cone.len() <= n.len());
            let cb = map[b.index()].expect("root retained").negate_if(b.is_negated());
            let cone = Netlist::from_raw_parts(
                cone.nodes().to_vec(),
                cone.constraints().to_vec(),
                vec![(name.clone(), cb)],
                cone.buses().clone(),
            );
            let single = Netlist::from_raw_parts(
                n.nodes().to_vec(),
                n.constraints().to_vec(),
                vec![(name.clone(), b)],
                n.buses().clone(),
            );
            let full = min_bad_depth(&single, 1 << 16).unwrap().min_bad_depth;
            let cut = min_bad_depth(&cone, 1 << 16).unwrap().min_bad_depth;
            assert_eq!(full, cut, "design {i} bad {name}");
        }
    }
}

/// Exchanging the reference and test copies changes neither the verdict
/// nor the counterexample depth.
#[test]
fn miter_roles_are_symmetric() {
    for f in corpus_suite().into_iter().filter(|f| f.check == ModelKind::InvalidInput) {
        let ast = parse(f.source()).unwrap();
        let e = elaborate(&ast, &f.config.elab_options()).unwrap();
        let opts = InvalidInputOptions { strict_input_ready: f.config.strict_input_ready, swap_roles: false };
        let a = build_invalid_input_model(&e, &opts).unwrap();
        let b = build_invalid_input_model(&e, &InvalidInputOptions { swap_roles: true, ..opts }).unwrap();
        let depth = |v: Verdict| match v {
            Verdict::Falsified { depth, .. } => Some(depth),
            _ => None,
        };
        assert_eq!(depth(bmc(&a, 12)), depth(bmc(&b, 12)), "{}", f.name);
    }
}

/// Deeper channels never turn a deadlock-free fixture into a deadlocking one.
#[test]
fn larger_capacities_keep_deadlock_proofs() {
    let mut checked = 0;
    for f in corpus_suite() {
        if f.check != ModelKind::Deadlock || f.expected == lichk_core::corpus::Expected::Falsified {
            continue;
        }
        let mut ast = parse(f.source()).unwrap();
        for ch in &mut ast.channels {
            ch.capacity += 1;
        }
        let e = elaborate(&ast, &f.config.elab_options()).unwrap();
        let m = build_model(&e, f.check, &f.config).unwrap();
        assert!(!matches!(bmc(&m, 20), Verdict::Falsified { .. }), "{}", f.name);
        checked += 1;
    }
    assert!(checked >= 5);
}
