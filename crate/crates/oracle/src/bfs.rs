// SPDX-License-Identifier: Apache-2.0

//! Explicit-state breadth-first reachability with exhaustive inputs.

use std::collections::HashSet;

use lichk_core::netlist::{Netlist, Node};

use crate::eval::{lit, Evaluator};

pub const MAX_INPUTS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsResult {
    /// Fewest transitions after which a bad can be asserted (constraints
    /// holding in every cycle), or `None` if no reachable state allows it.
    pub min_bad_depth: Option<usize>,
    /// Distinct states visited.
    pub states: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BfsError {
    TooManyInputs(usize),
    TooManyStates(usize),
}

type State = Vec<bool>;

pub fn min_bad_depth(n: &Netlist, max_states: usize) -> Result<BfsResult, BfsError> {
    let ni = n.inputs().len();
    if ni > MAX_INPUTS {
        return Err(BfsError::TooManyInputs(ni));
    }
    let ev = Evaluator::new(n);
    let init: State = n.latches().iter().map(|&l| matches!(n.nodes()[l], Node::Latch { init: true, .. })).collect();
    let nexts: Vec<_> = n.latches().iter().map(|&l| n.latch_next(l).expect("latch has a next function")).collect();
    let combos: u64 = 1 << ni;
    let lanes = combos.min(64) as usize;
    let lane_mask = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
    let batches = combos.div_ceil(64);

    let input_batches: Vec<Vec<u64>> = (0..batches)
        .map(|batch| {
            (0..ni).map(|i| (0..lanes).fold(0u64, |w, j| w | ((((batch * 64 + j as u64) >> i) & 1) << j))).collect()
        })
        .collect();

    let mut seen: HashSet<State> = HashSet::new();
    seen.insert(init.clone());
    let mut frontier = vec![init];
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next_frontier = Vec::new();
        for s in &frontier {
            let latch_words: Vec<u64> = s.iter().map(|&b| if b { u64::MAX } else { 0 }).collect();
            for inputs in &input_batches {
                let w = ev.eval(&latch_words, inputs);
                let ok = n.constraints().iter().fold(lane_mask, |m, &c| m & lit(&w, c));
                let bad = n.bads().iter().fold(0, |m, (_, b)| m | lit(&w, *b)) & ok;
                if bad != 0 {
                    return Ok(BfsResult { min_bad_depth: Some(depth), states: seen.len() });
                }
                let next_words: Vec<u64> = nexts.iter().map(|&r| lit(&w, r)).collect();
                for j in 0..lanes {
                    if (ok >> j) & 1 == 0 {
                        continue;
                    }
                    let succ: State = next_words.iter().map(|&x| (x >> j) & 1 == 1).collect();
                    if !seen.contains(&succ) {
                        if seen.len() >= max_states {
                            return Err(BfsError::TooManyStates(max_states));
                        }
                        seen.insert(succ.clone());
                        next_frontier.push(succ);
                    }
                }
            }
        }
        frontier = next_frontier;
        depth += 1;
    }
    Ok(BfsResult { min_bad_depth: None, states: seen.len() })
}
