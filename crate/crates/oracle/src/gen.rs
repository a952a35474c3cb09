// SPDX-License-Identifier: Apache-2.0

//! Random netlists and random 3-CNF instances.

use lichk_core::netlist::{Netlist, NodeRef};
use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub struct NetlistParams {
    pub max_inputs: usize,
    pub max_latches: usize,
    pub max_gates: usize,
    /// Chance of adding a constraint.
    pub constraint_prob: f64,
}

impl Default for NetlistParams {
    fn default() -> Self {
        NetlistParams { max_inputs: 4, max_latches: 16, max_gates: 200, constraint_prob: 0.25 }
    }
}

fn pick(rng: &mut impl Rng, pool: &[NodeRef]) -> NodeRef {
    pool[rng.gen_range(0..pool.len())].negate_if(rng.gen())
}

pub fn random_netlist(rng: &mut impl Rng, p: &NetlistParams) -> Netlist {
    let mut n = if rng.gen() { Netlist::new() } else { Netlist::without_strash() };
    let mut pool = Vec::new();
    for i in 0..rng.gen_range(1..=p.max_inputs) {
        pool.push(n.add_input(format!("i{i}")).expect("fresh name"));
    }
    let inits: Vec<bool> = (0..rng.gen_range(1..=p.max_latches)).map(|_| rng.gen_bool(0.3)).collect();
    let latches: Vec<NodeRef> =
        inits.iter().enumerate().map(|(i, &init)| n.add_latch(init, format!("l{i}"))).collect();
    pool.extend(&latches);
    // Leave room for the counter, bad and constraint logic added below.
    let budget = rng.gen_range(0..=p.max_gates.saturating_sub(40));
    while n.num_ands() + 3 <= budget {
        let (a, b) = (pick(rng, &pool), pick(rng, &pool));
        let before = n.num_ands();
        let g = if rng.gen_bool(0.3) { n.xor(a, b) } else { n.add_and(a, b) }.expect("valid fanins");
        if n.num_ands() > before {
            pool.push(g);
        } else if rng.gen_bool(0.1) {
            break;
        }
    }
    let recent = pool.len().saturating_sub(40);
    // Some latches form a shift chain or an enabled counter so that bads
    // can sit deep in the state space; the rest get random next functions.
    let structured = match rng.gen_range(0..3) {
        0 => 0,
        _ => rng.gen_range(0..=latches.len().min(8)),
    };
    let (chain, rest) = latches.split_at(structured);
    if rng.gen() {
        for (k, &l) in chain.iter().enumerate() {
            let nx = if k == 0 { pick(rng, &pool[recent..]) } else { chain[k - 1] };
            n.set_latch_next(l, nx).expect("latch");
        }
    } else {
        let mut carry = pick(rng, &pool[..n.inputs().len()]);
        for &l in chain.iter().take(5) {
            let nx = n.xor(l, carry).expect("valid fanins");
            carry = n.add_and(l, carry).expect("valid fanins");
            n.set_latch_next(l, nx).expect("latch");
        }
        for (k, &l) in chain.iter().enumerate().skip(5) {
            n.set_latch_next(l, chain[k - 1]).expect("latch");
        }
    }
    for &l in rest {
        let nx = pick(rng, &pool);
        n.set_latch_next(l, nx).expect("latch");
    }
    for k in 0..rng.gen_range(1..=2) {
        // A conjunction of state literals, so the bad usually needs a few steps.
        // Mostly literals that are false in the reset state.
        let terms: Vec<NodeRef> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let k = rng.gen_range(0..latches.len());
                latches[k].negate_if(if rng.gen_bool(0.8) { inits[k] } else { rng.gen() })
            })
            .collect();
        let mut bad = NodeRef::TRUE;
        for t in terms {
            bad = n.add_and(bad, t).expect("valid fanins");
        }
        if rng.gen_bool(0.3) {
            let g = pick(rng, &pool);
            bad = n.add_and(bad, g).expect("valid fanins");
        }
        n.add_bad(format!("bad{k}"), bad).expect("valid bad");
    }
    if rng.gen_bool(p.constraint_prob) {
        let c = n.or(pick(rng, &pool[..n.inputs().len()]), pick(rng, &pool)).expect("valid fanins");
        n.add_constraint(c).expect("valid constraint");
    }
    n
}

/// Random 3-CNF; `num_vars` in `3..=max_vars`, clause count in `1..=max_clauses`.
pub fn random_3cnf(rng: &mut impl Rng, max_vars: u32, max_clauses: usize) -> (u32, Vec<Vec<i32>>) {
    let vars = rng.gen_range(3..=max_vars);
    let clauses = (0..rng.gen_range(1..=max_clauses))
        .map(|_| {
            (0..3)
                .map(|_| {
                    let v = rng.gen_range(1..=vars as i32);
                    if rng.gen() {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    (vars, clauses)
}
