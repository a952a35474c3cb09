// SPDX-License-Identifier: Apache-2.0

mod common;

use common::{corpus_text, Harness};
use lichk_core::elab::{elaborate, ElabOptions, ElaboratedDesign};
use lichk_core::lang::parse;
use lichk_core::netlist::Node;
use lichk_core::wrappers::{
    build_deadlock_model, build_invalid_input_model, DeadlockOptions, EnvValid, InvalidInputOptions, ModelKind,
    WrapperError,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn design(name: &str) -> ElaboratedDesign {
    elaborate(&parse(&corpus_text(name)).unwrap(), &ElabOptions::default()).unwrap()
}

fn bad_names(m: &lichk_core::wrappers::CheckModel) -> Vec<String> {
    m.bads().iter().map(|(n, _)| n.clone()).collect()
}

#[test]
fn miter_has_shared_and_private_inputs() {
    let e = design("adder_blocking");
    let m = build_invalid_input_model(&e, &InvalidInputOptions::default()).unwrap();
    assert_eq!(m.kind, ModelKind::InvalidInput);
    let n = &m.netlist;
    for x in ["A", "B"] {
        assert!(n.input(&format!("{x}.vld")).is_some());
        for i in 0..4 {
            for tag in ["dat", "dat_inv_ref", "dat_inv_test"] {
                assert!(n.input(&format!("{x}.{tag}[{i}]")).is_some(), "{x}.{tag}[{i}]");
            }
        }
    }
    assert!(n.input("S.rdy").is_some());
    assert_eq!(n.inputs().len(), 2 * (1 + 3 * 4) + 1);
    assert_eq!(bad_names(&m), ["__bad.B1.S", "__bad.B2.S"]);
    assert!(n.constraints().is_empty());
    assert_eq!(m.correspondence.len(), e.netlist.latches().len());
    for (r, t) in &m.correspondence {
        assert!(matches!(n.node(*r), Node::Latch { name, .. } if name.starts_with("ref.")));
        assert!(matches!(n.node(*t), Node::Latch { name, .. } if name.starts_with("test.")));
    }
    for sig in ["A.dat_inv_ref", "A.dat_inv_test", "ref.S.vld", "test.S.dat", "ref.adder.__stall"] {
        assert!(m.signal_map.contains_key(sig), "{sig}");
    }
}

#[test]
fn strict_mode_adds_input_ready_bads() {
    let e = design("adder_nb_guarded");
    let opts = InvalidInputOptions { strict_input_ready: true, swap_roles: false };
    let m = build_invalid_input_model(&e, &opts).unwrap();
    assert_eq!(bad_names(&m), ["__bad.B1.S", "__bad.B2.S", "__bad.B3.A", "__bad.B3.B"]);
}

#[test]
fn invalid_input_needs_external_ports() {
    let e = design("producer_consumer_buggy");
    assert!(matches!(
        build_invalid_input_model(&e, &InvalidInputOptions::default()),
        Err(WrapperError::NoExternalPorts)
    ));
}

#[test]
fn deadlock_constraints_are_bare_environment_inputs() {
    let e = design("mismatched_depths_initial");
    for (env, expected) in [(EnvValid::Constrained, vec!["In.vld", "Out.rdy"]), (EnvValid::Free, vec!["Out.rdy"])] {
        let m = build_deadlock_model(&e, &DeadlockOptions { env_valid: env }).unwrap();
        let n = &m.netlist;
        let mut names: Vec<&str> = n
            .constraints()
            .iter()
            .map(|c| {
                assert!(!c.is_negated());
                n.input_name(c.index()).expect("constraint on an input")
            })
            .collect();
        names.sort();
        assert_eq!(names, expected);
        assert_eq!(bad_names(&m), ["__bad.deadlock"]);
        assert!(m.correspondence.is_empty());
    }
}

#[test]
fn deadlock_bad_is_conjunction_of_stalls() {
    let e = design("producer_consumer_buggy");
    let m = build_deadlock_model(&e, &DeadlockOptions::default()).unwrap();
    let mut h = Harness::new(&m.netlist);
    for _ in 0..6 {
        h.eval();
        let all = h.bit("producer.__stall") && h.bit("consumer.__stall");
        assert_eq!(h.sim.value(m.bads()[0].1), all);
        h.step();
    }
}

/// Random simulation of the miter: the blocking adder never diverges, the
/// unguarded one does.
#[test]
fn miter_simulation_separates_adders() {
    let mut rng = StdRng::seed_from_u64(7);
    for (name, expect_bad) in [("adder_blocking", false), ("adder_nb_guarded", false), ("adder_nb_unguarded", true)] {
        let e = design(name);
        let m = build_invalid_input_model(&e, &InvalidInputOptions::default()).unwrap();
        let mut h = Harness::new(&m.netlist);
        let mut fired = false;
        for _ in 0..3000 {
            for x in ["A", "B"] {
                h.set(&format!("{x}.vld"), rng.gen_bool(0.5));
                for tag in ["dat", "dat_inv_ref", "dat_inv_test"] {
                    h.set_word(&format!("{x}.{tag}"), 4, rng.gen_range(0..16));
                }
            }
            h.set("S.rdy", rng.gen_bool(0.7));
            h.eval();
            fired |= m.bads().iter().any(|(_, b)| h.sim.value(*b));
            h.step();
        }
        assert_eq!(fired, expect_bad, "{name}");
    }
}

#[test]
fn swapped_roles_mirror_the_copies() {
    let e = design("adder_nb_unguarded");
    let a = build_invalid_input_model(&e, &InvalidInputOptions::default()).unwrap();
    let b = build_invalid_input_model(&e, &InvalidInputOptions { swap_roles: true, ..Default::default() }).unwrap();
    assert_eq!(bad_names(&a), bad_names(&b));
    assert_eq!(a.netlist.inputs().len(), b.netlist.inputs().len());
    // Driving the invalid data of one side in `a` and the other side in `b`
    // produces the same bad behaviour.
    let mut ha = Harness::new(&a.netlist);
    let mut hb = Harness::new(&b.netlist);
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..500 {
        for x in ["A", "B"] {
            let v = rng.gen_bool(0.5);
            let (d, r, t) = (rng.gen_range(0..16), rng.gen_range(0..16), rng.gen_range(0..16));
            for h in [&mut ha, &mut hb] {
                h.set(&format!("{x}.vld"), v);
                h.set_word(&format!("{x}.dat"), 4, d);
            }
            ha.set_word(&format!("{x}.dat_inv_ref"), 4, r);
            ha.set_word(&format!("{x}.dat_inv_test"), 4, t);
            hb.set_word(&format!("{x}.dat_inv_ref"), 4, t);
            hb.set_word(&format!("{x}.dat_inv_test"), 4, r);
        }
        let rdy = rng.gen_bool(0.8);
        ha.set("S.rdy", rdy);
        hb.set("S.rdy", rdy);
        ha.eval();
        hb.eval();
        for ((_, x), (_, y)) in a.bads().iter().zip(b.bads()) {
            assert_eq!(ha.sim.value(*x), hb.sim.value(*y));
        }
        ha.step();
        hb.step();
    }
}
