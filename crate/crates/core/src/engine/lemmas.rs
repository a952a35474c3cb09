// SPDX-License-Identifier: Apache-2.0

//! Invariant strengthening.
//!
//! Candidate invariants are two-literal clauses over latches and, for
//! miters, relations between corresponding latches of the two copies:
//! plain equality, and equality under a one-bit register of the ref copy.
//! Candidates refuted by random simulation are dropped, then the rest are
//! pruned to a mutually inductive subset (Houdini). The survivors hold in
//! every reachable state, so the engines may assume them in every frame.

use std::collections::HashSet;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::netlist::{Netlist, Node, NodeRef, Simulator};
use crate::wrappers::CheckModel;

use super::cnf::ClauseSink;
use super::sat::{SatResult, Solver};
use super::unroll::{InitMode, Unroller};

/// Above this many conditional candidates only plain equalities are tried.
const MAX_CANDIDATES: usize = 50_000;
/// Above this many latches no clause candidates are generated.
const MAX_CLAUSE_LATCHES: usize = 160;
const SIM_RUNS: usize = 64;
const SIM_CYCLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    /// `a | b`
    Or(NodeRef, NodeRef),
    Eq(NodeRef, NodeRef),
    /// `cond -> a == b`
    Implies { cond: NodeRef, a: NodeRef, b: NodeRef },
}

impl Lemma {
    pub fn holds(&self, value: impl Fn(NodeRef) -> bool) -> bool {
        match *self {
            Lemma::Or(a, b) => value(a) || value(b),
            Lemma::Eq(a, b) => value(a) == value(b),
            Lemma::Implies { cond, a, b } => !value(cond) || value(a) == value(b),
        }
    }

    fn clauses(&self, lit: impl Fn(NodeRef) -> i32) -> Vec<Vec<i32>> {
        match *self {
            Lemma::Or(a, b) => vec![vec![lit(a), lit(b)]],
            Lemma::Eq(a, b) => vec![vec![-lit(a), lit(b)], vec![lit(a), -lit(b)]],
            Lemma::Implies { cond, a, b } => {
                let c = lit(cond);
                vec![vec![-c, -lit(a), lit(b)], vec![-c, lit(a), -lit(b)]]
            }
        }
    }

    /// Fresh variable that implies the lemma is violated.
    fn violation(&self, sink: &mut impl ClauseSink, lit: impl Fn(NodeRef) -> i32) -> i32 {
        let d = sink.new_var();
        let (a, b) = match *self {
            Lemma::Or(a, b) => {
                sink.add_clause(&[-d, -lit(a)]);
                sink.add_clause(&[-d, -lit(b)]);
                return d;
            }
            Lemma::Eq(a, b) => (a, b),
            Lemma::Implies { cond, a, b } => {
                sink.add_clause(&[-d, lit(cond)]);
                (a, b)
            }
        };
        sink.add_clause(&[-d, lit(a), lit(b)]);
        sink.add_clause(&[-d, -lit(a), -lit(b)]);
        d
    }

    /// Asserts the lemma in `frame`.
    pub(crate) fn assert_in(&self, sink: &mut impl ClauseSink, un: &Unroller, frame: usize) {
        for c in self.clauses(|r| un.lit(r, frame)) {
            sink.add_clause(&c);
        }
    }
}

fn remap(map: &[Option<NodeRef>], r: NodeRef) -> Option<NodeRef> {
    map[r.index()].map(|m| m.negate_if(r.is_negated()))
}

/// Every unit and two-literal clause over the latches of `n`.
pub fn clause_candidates(n: &Netlist) -> Vec<Lemma> {
    let ls: Vec<NodeRef> = n.latches().iter().map(|&l| NodeRef::new(l, false)).collect();
    if ls.len() > MAX_CLAUSE_LATCHES {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &a) in ls.iter().enumerate() {
        out.push(Lemma::Or(a, a));
        out.push(Lemma::Or(!a, !a));
        for &b in &ls[i + 1..] {
            for (pa, pb) in [(false, false), (false, true), (true, false), (true, true)] {
                out.push(Lemma::Or(a.negate_if(pa), b.negate_if(pb)));
            }
        }
    }
    out
}

/// Miter candidates over the cone-reduced netlist (`map` sends model nodes to it).
pub fn miter_candidates(model: &CheckModel, map: &[Option<NodeRef>]) -> Vec<Lemma> {
    let pairs: Vec<(NodeRef, NodeRef)> = model
        .correspondence
        .iter()
        .filter_map(|&(r, t)| Some((remap(map, r)?, remap(map, t)?)))
        .filter(|(r, t)| r != t)
        .collect();
    let mut out: Vec<Lemma> = pairs.iter().map(|&(r, t)| Lemma::Eq(r, t)).collect();
    let n = &model.netlist;
    let conds: Vec<NodeRef> = n
        .buses()
        .iter()
        .filter(|(name, bits)| name.starts_with("ref.") && bits.len() == 1)
        .filter(|(_, bits)| matches!(n.node(bits[0]), Node::Latch { .. }))
        .filter_map(|(_, bits)| remap(map, bits[0].regular()))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    let mut conds = conds;
    conds.sort_by_key(|c| c.index());
    if conds.len() * pairs.len() * 2 <= MAX_CANDIDATES {
        for &c in &conds {
            for &(r, t) in &pairs {
                if r.regular() == c || t.regular() == c {
                    continue;
                }
                out.push(Lemma::Implies { cond: c, a: r, b: t });
                out.push(Lemma::Implies { cond: !c, a: r, b: t });
            }
        }
    }
    out
}

/// Drops candidates that fail in the initial state or along random runs.
pub fn filter_by_simulation(n: &Netlist, cands: Vec<Lemma>, seed: u64) -> Vec<Lemma> {
    let Ok(mut sim) = Simulator::new(n) else { return Vec::new() };
    let mut rng = StdRng::seed_from_u64(seed);
    let forced: Vec<Option<bool>> = n
        .inputs()
        .iter()
        .map(|&i| {
            n.constraints().iter().find(|c| c.index() == i).map(|c| !c.is_negated())
        })
        .collect();
    let mut alive = cands;
    for _ in 0..SIM_RUNS {
        sim.reset();
        for _ in 0..SIM_CYCLES {
            let ins: Vec<bool> = forced.iter().map(|f| f.unwrap_or_else(|| rng.gen())).collect();
            sim.eval(&ins);
            alive.retain(|l| l.holds(|r| sim.value(r)));
            if n.constraints().iter().any(|&c| !sim.value(c)) {
                break;
            }
            sim.step(&ins);
        }
    }
    alive
}

/// Greatest subset of `cands` that is inductive relative to itself and the
/// constraints. Candidates must already hold in the initial state.
/// Returns `None` when the deadline passes.
pub fn houdini(n: &Netlist, cands: Vec<Lemma>, seed: u64, deadline: Option<Instant>) -> Option<Vec<Lemma>> {
    if cands.is_empty() {
        return Some(cands);
    }
    let mut solver = Solver::with_seed(seed);
    solver.set_deadline(deadline);
    let mut un = Unroller::new(n, InitMode::Free).ok()?;
    un.add_frame(&mut solver);
    un.add_frame(&mut solver);
    let mut acts = Vec::with_capacity(cands.len());
    let mut viol = Vec::with_capacity(cands.len());
    for l in &cands {
        let act = solver.new_var();
        for mut c in l.clauses(|r| un.lit(r, 0)) {
            c.push(-act);
            solver.add_clause(&c);
        }
        acts.push(act);
        viol.push(l.violation(&mut solver, |r| un.lit(r, 1)));
    }
    let mut alive = vec![true; cands.len()];
    loop {
        let q = solver.new_var();
        let mut query = vec![-q];
        let mut assumptions = vec![q];
        for i in 0..cands.len() {
            if alive[i] {
                query.push(viol[i]);
                assumptions.push(acts[i]);
            }
        }
        solver.add_clause(&query);
        match solver.solve(&assumptions) {
            SatResult::Unsat => break,
            SatResult::Unknown => return None,
            SatResult::Sat(model) => {
                let value = |r: NodeRef| {
                    let l = un.lit(r, 1);
                    model[l.unsigned_abs() as usize] == (l > 0)
                };
                let mut dropped = false;
                for i in 0..cands.len() {
                    if alive[i] && !cands[i].holds(value) {
                        alive[i] = false;
                        dropped = true;
                    }
                }
                assert!(dropped, "houdini model refutes no candidate");
            }
        }
        solver.add_clause(&[-q]);
    }
    Some(cands.into_iter().zip(alive).filter_map(|(l, a)| a.then_some(l)).collect())
}
