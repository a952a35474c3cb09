// SPDX-License-Identifier: Apache-2.0

//! SAT-based model checking of check models: incremental bounded model
//! checking and k-induction with a lazily enforced simple-path condition.
//!
//! Depth `d` means the bad fires in frame `d`, i.e. after `d` transitions
//! from reset; a counterexample of depth `d` has `d + 1` cycles.

pub mod cnf;
pub mod dimacs;
pub mod lemmas;
pub mod sat;
pub mod trace;
pub mod unroll;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{Netlist, NetlistError, NodeRef};
use crate::wrappers::CheckModel;

use cnf::{ClauseSink, CnfFormula};
use lemmas::Lemma;
use sat::{SatResult, Solver};
pub use trace::{Replay, Trace};
use unroll::{estimated_literals, FrameMap, InitMode, Unroller};

/// Refuse to build encodings larger than this many literals.
pub const MAX_LITERALS: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum EngineKind {
    #[default]
    #[serde(rename = "bmc")]
    Bmc,
    #[serde(rename = "kind")]
    KInduction,
}

impl EngineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineKind::Bmc => "bmc",
            EngineKind::KInduction => "kind",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub kind: EngineKind,
    /// Deepest frame to examine.
    pub bound: usize,
    pub timeout: Option<Duration>,
    pub seed: u64,
    /// Assume automatically discovered invariants in every frame.
    pub strengthen: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { kind: EngineKind::Bmc, bound: 50, timeout: None, seed: 0, strengthen: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Falsified { depth: usize, bad: String, trace: Trace },
    Proven { k: usize },
    BoundReached { bound: usize },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Falsified { .. } => "falsified",
            Verdict::Proven { .. } => "proven",
            Verdict::BoundReached { .. } => "bound_reached",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: Verdict,
    /// Frames `0..frames_explored` were searched for a bad.
    pub frames_explored: usize,
    /// Lemmas used to strengthen induction.
    pub lemmas: usize,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("encoding would need about {literals} literals, above the limit of {MAX_LITERALS}")]
    TooLarge { literals: u64 },
    #[error("time limit reached{}", match .last_completed { Some(d) => format!(" (no counterexample up to depth {d})"), None => String::new() })]
    ResourceLimit { last_completed: Option<usize> },
    #[error("internal soundness error: {0}")]
    Soundness(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

fn guard_size(n: &Netlist, frames: usize) -> Result<(), EngineError> {
    let literals = estimated_literals(n, frames);
    if literals > MAX_LITERALS {
        return Err(EngineError::TooLarge { literals });
    }
    Ok(())
}

/// Incremental BMC over reset-initialized frames.
struct Bmc<'a> {
    un: Unroller<'a>,
    solver: Solver,
    bads: Vec<NodeRef>,
    lemmas: Vec<Lemma>,
}

enum Step<T> {
    Hit(T),
    Clear,
    Timeout,
}

impl<'a> Bmc<'a> {
    fn new(n: &'a Netlist, bads: Vec<NodeRef>, seed: u64, deadline: Option<Instant>) -> Result<Self, EngineError> {
        let mut solver = Solver::with_seed(seed);
        solver.set_deadline(deadline);
        Ok(Bmc { un: Unroller::new(n, InitMode::Reset)?, solver, bads, lemmas: Vec::new() })
    }

    /// Checks the next depth; returns input values per frame on a hit.
    fn next_depth(&mut self) -> Result<Step<Vec<Vec<bool>>>, EngineError> {
        let n = self.un.netlist();
        let d = self.un.num_frames();
        guard_size(n, d + 1)?;
        if self.solver.out_of_time() {
            return Ok(Step::Timeout);
        }
        self.un.add_frame(&mut self.solver);
        for l in &self.lemmas {
            l.assert_in(&mut self.solver, &self.un, d);
        }
        let act = self.solver.new_var();
        let mut q = vec![-act];
        q.extend(self.bads.iter().map(|&b| self.un.lit(b, d)));
        self.solver.add_clause(&q);
        let r = self.solver.solve(&[act]);
        self.solver.add_clause(&[-act]);
        match r {
            SatResult::Unknown => Ok(Step::Timeout),
            SatResult::Unsat => {
                for &b in &self.bads {
                    let l = self.un.lit(b, d);
                    self.solver.add_clause(&[-l]);
                }
                Ok(Step::Clear)
            }
            SatResult::Sat(model) => {
                if !self.solver.verify_model() {
                    return Err(EngineError::Soundness("SAT model violates a clause".into()));
                }
                let steps = (0..=d)
                    .map(|t| {
                        n.inputs().iter().map(|&i| model[self.un.map().var(i, t) as usize]).collect()
                    })
                    .collect();
                Ok(Step::Hit(steps))
            }
        }
    }
}

/// Induction step solver: free initial frame, bads excluded from all but
/// the last frame, lemmas in every frame, pairwise distinct states on demand.
struct Induction<'a> {
    un: Unroller<'a>,
    solver: Solver,
    bads: Vec<NodeRef>,
    lemmas: Vec<Lemma>,
    distinct: HashSet<(usize, usize)>,
}

impl<'a> Induction<'a> {
    fn new(n: &'a Netlist, bads: Vec<NodeRef>, lemmas: Vec<Lemma>, seed: u64, deadline: Option<Instant>) -> Result<Self, EngineError> {
        let mut solver = Solver::with_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
        solver.set_deadline(deadline);
        Ok(Induction { un: Unroller::new(n, InitMode::Free)?, solver, bads, lemmas, distinct: HashSet::new() })
    }

    fn add_frame(&mut self) -> usize {
        let t = self.un.add_frame(&mut self.solver);
        for l in &self.lemmas {
            l.assert_in(&mut self.solver, &self.un, t);
        }
        t
    }

    fn require_distinct(&mut self, i: usize, j: usize) {
        let n = self.un.netlist();
        let mut clause = Vec::new();
        for &l in n.latches() {
            let (a, b) = (self.un.map().var(l, i), self.un.map().var(l, j));
            let d = self.solver.new_var();
            self.solver.add_clause(&[-d, a, b]);
            self.solver.add_clause(&[-d, -a, -b]);
            clause.push(d);
        }
        self.solver.add_clause(&clause);
        self.distinct.insert((i, j));
    }

    /// Is every path of `k + 1` states with no bad in the first `k` free of
    /// bads in the last one?
    fn check(&mut self, k: usize) -> Result<Step<()>, EngineError> {
        let n = self.un.netlist();
        guard_size(n, k + 1)?;
        if self.solver.out_of_time() {
            return Ok(Step::Timeout);
        }
        while self.un.num_frames() <= k {
            let t = self.add_frame();
            if t > 0 {
                for &b in &self.bads {
                    let l = self.un.lit(b, t - 1);
                    self.solver.add_clause(&[-l]);
                }
            }
        }
        let act = self.solver.new_var();
        let mut q = vec![-act];
        q.extend(self.bads.iter().map(|&b| self.un.lit(b, k)));
        self.solver.add_clause(&q);
        let out = loop {
            match self.solver.solve(&[act]) {
                SatResult::Unknown => break Step::Timeout,
                SatResult::Unsat => break Step::Clear,
                SatResult::Sat(model) => {
                    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
                    let mut dup = None;
                    for t in 0..=k {
                        let s: Vec<bool> =
                            n.latches().iter().map(|&l| model[self.un.map().var(l, t) as usize]).collect();
                        if let Some(&i) = seen.get(&s) {
                            if !self.distinct.contains(&(i, t)) {
                                dup = Some((i, t));
                                break;
                            }
                        }
                        seen.insert(s, t);
                    }
                    match dup {
                        Some((i, j)) => self.require_distinct(i, j),
                        None => break Step::Hit(()),
                    }
                }
            }
        };
        self.solver.add_clause(&[-act]);
        Ok(out)
    }
}

/// Runs the configured engine on a check model.
pub fn check(model: &CheckModel, opts: &EngineOptions) -> Result<CheckResult, EngineError> {
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    let full = &model.netlist;
    let roots: Vec<NodeRef> = full.bads().iter().map(|(_, b)| *b).chain(full.constraints().iter().copied()).collect();
    let (reduced, map) = full.cone_with_map(&roots)?;
    let bads: Vec<NodeRef> = reduced.bads().iter().map(|(_, b)| *b).collect();

    let mut bmc = Bmc::new(&reduced, bads.clone(), opts.seed, deadline)?;
    let mut last_completed = None;
    let mut num_lemmas = 0;
    let mut lemma_set = Vec::new();
    // Depth 0 first: a bad in the reset state needs no invariants.
    let hit0 = base_step(&mut bmc, full, &reduced, 0, &mut last_completed)?;
    if let Some(r) = hit0 {
        return Ok(r);
    }
    if opts.strengthen {
        let mut cands = lemmas::miter_candidates(model, &map);
        cands.extend(lemmas::clause_candidates(&reduced));
        let cands = lemmas::filter_by_simulation(&reduced, cands, opts.seed);
        lemma_set =
            lemmas::houdini(&reduced, cands, opts.seed, deadline).ok_or(EngineError::ResourceLimit { last_completed })?;
        num_lemmas = lemma_set.len();
        bmc.lemmas = lemma_set.clone();
    }

    let bound_reached = CheckResult {
        verdict: Verdict::BoundReached { bound: opts.bound },
        frames_explored: opts.bound + 1,
        lemmas: num_lemmas,
    };
    match opts.kind {
        EngineKind::Bmc => {
            for d in 1..=opts.bound {
                if let Some(mut r) = base_step(&mut bmc, full, &reduced, d, &mut last_completed)? {
                    r.lemmas = num_lemmas;
                    return Ok(r);
                }
            }
            Ok(bound_reached)
        }
        EngineKind::KInduction => {
            let mut step = Induction::new(&reduced, bads.clone(), lemma_set, opts.seed, deadline)?;
            for k in 1..=opts.bound {
                match step.check(k)? {
                    Step::Timeout => return Err(EngineError::ResourceLimit { last_completed }),
                    Step::Clear => {
                        return Ok(CheckResult { verdict: Verdict::Proven { k }, frames_explored: k, lemmas: num_lemmas })
                    }
                    Step::Hit(()) => {}
                }
                if let Some(mut r) = base_step(&mut bmc, full, &reduced, k, &mut last_completed)? {
                    r.lemmas = num_lemmas;
                    return Ok(r);
                }
            }
            Ok(bound_reached)
        }
    }
}

fn base_step(
    bmc: &mut Bmc,
    full: &Netlist,
    reduced: &Netlist,
    depth: usize,
    last: &mut Option<usize>,
) -> Result<Option<CheckResult>, EngineError> {
    match bmc.next_depth()? {
        Step::Timeout => Err(EngineError::ResourceLimit { last_completed: *last }),
        Step::Clear => {
            *last = Some(depth);
            Ok(None)
        }
        Step::Hit(steps) => {
            let verdict = lift_counterexample(full, reduced, steps)?;
            Ok(Some(CheckResult { verdict, frames_explored: depth + 1, lemmas: 0 }))
        }
    }
}

/// Replays a counterexample found on the reduced netlist against the full
/// model; anything but a valid counterexample is an internal error.
fn lift_counterexample(full: &Netlist, reduced: &Netlist, steps: Vec<Vec<bool>>) -> Result<Verdict, EngineError> {
    let depth = steps.len() - 1;
    let inputs: Vec<String> = full.inputs().iter().map(|&i| full.input_name(i).unwrap_or_default().to_string()).collect();
    let col: HashMap<&str, usize> = reduced
        .inputs()
        .iter()
        .enumerate()
        .map(|(k, &i)| (reduced.input_name(i).unwrap_or_default(), k))
        .collect();
    let steps = steps
        .iter()
        .map(|row| inputs.iter().map(|name| col.get(name.as_str()).is_some_and(|&k| row[k])).collect())
        .collect();
    let trace = Trace { inputs, steps };
    let replay = trace.replay(full).map_err(|e| EngineError::Soundness(format!("trace replay failed: {e}")))?;
    if let Some(t) = replay.constraint_violation {
        return Err(EngineError::Soundness(format!("counterexample violates a constraint in cycle {t}")));
    }
    let bad = replay
        .bads_fired
        .first()
        .cloned()
        .ok_or_else(|| EngineError::Soundness(format!("counterexample of depth {depth} does not reach a bad")))?;
    Ok(Verdict::Falsified { depth, bad, trace })
}

/// The BMC query for exactly `depth` as a standalone formula over the full
/// model, with the variable map of every frame.
pub fn export_dimacs(model: &CheckModel, depth: usize) -> Result<(CnfFormula, FrameMap), EngineError> {
    let n = &model.netlist;
    guard_size(n, depth + 1)?;
    let mut cnf = CnfFormula::new();
    let mut un = Unroller::new(n, InitMode::Reset)?;
    for _ in 0..=depth {
        un.add_frame(&mut cnf);
    }
    let q: Vec<i32> = n.bads().iter().map(|(_, b)| un.lit(*b, depth)).collect();
    cnf.add_clause(&q);
    Ok((cnf, un.map().clone()))
}
