// SPDX-License-Identifier: Apache-2.0

//! 64-lane bit-parallel combinational evaluation.

use lichk_core::netlist::{Netlist, Node, NodeRef};

pub struct Evaluator<'a> {
    n: &'a Netlist,
    order: Vec<usize>,
}

/// Post-order over AND fanins, computed without the netlist's own helpers.
fn and_order(n: &Netlist) -> Vec<usize> {
    let nodes = n.nodes();
    let mut done = vec![false; nodes.len()];
    let mut order = Vec::new();
    for root in 0..nodes.len() {
        let mut stack = vec![(root, false)];
        while let Some((i, expanded)) = stack.pop() {
            if done[i] {
                continue;
            }
            match nodes[i] {
                Node::And(a, b) if !expanded => {
                    stack.push((i, true));
                    stack.push((a.index(), false));
                    stack.push((b.index(), false));
                }
                Node::And(..) => {
                    done[i] = true;
                    order.push(i);
                }
                _ => done[i] = true,
            }
        }
    }
    order
}

impl<'a> Evaluator<'a> {
    pub fn new(n: &'a Netlist) -> Self {
        Evaluator { n, order: and_order(n) }
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.n
    }

    /// Word of every node given one word per latch and per input.
    pub fn eval(&self, latches: &[u64], inputs: &[u64]) -> Vec<u64> {
        let nodes = self.n.nodes();
        let mut w = vec![0u64; nodes.len()];
        for (&i, &v) in self.n.inputs().iter().zip(inputs) {
            w[i] = v;
        }
        for (&i, &v) in self.n.latches().iter().zip(latches) {
            w[i] = v;
        }
        for &g in &self.order {
            if let Node::And(a, b) = nodes[g] {
                w[g] = lit(&w, a) & lit(&w, b);
            }
        }
        w
    }
}

pub fn lit(words: &[u64], r: NodeRef) -> u64 {
    if r.is_negated() {
        !words[r.index()]
    } else {
        words[r.index()]
    }
}
