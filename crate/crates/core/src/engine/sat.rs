// SPDX-License-Identifier: Apache-2.0

//! CDCL SAT solver: two watched literals, first-UIP learning with clause
//! minimization, VSIDS with phase saving, Luby restarts, learnt clause
//! deletion, incremental clause addition and solving under assumptions.
//!
//! The external interface uses DIMACS literals (non-zero `i32`, variables
//! numbered from 1). Variables are created on demand.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::cnf::CnfFormula;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    /// Satisfying assignment, indexed by variable (index 0 unused).
    Sat(Vec<bool>),
    Unsat,
    /// Deadline hit before a decision was reached.
    Unknown,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(l: i32) -> Lit {
        let v = l.unsigned_abs() - 1;
        Lit(v << 1 | (l < 0) as u32)
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn neg(self) -> bool {
        self.0 & 1 == 1
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Max-heap of variables ordered by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, NOT_IN_HEAP);
    }
    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }
    fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }
    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r]] > act[self.heap[l]] { r } else { l };
            if act[self.heap[c]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }
    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = i;
        self.up(i, act);
    }
    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v], act);
        }
    }
    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

pub struct Solver {
    clauses: Vec<Clause>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    polarity: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    model: Vec<bool>,
    rng: StdRng,
    max_learnts: f64,
    deadline: Option<Instant>,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0u32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq as i32)
}

impl Solver {
    pub fn new() -> Self {
        Self::with_seed(0)
    }

    pub fn with_seed(seed: u64) -> Self {
        Solver {
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            polarity: Vec::new(),
            seen: Vec::new(),
            ok: true,
            model: Vec::new(),
            rng: StdRng::seed_from_u64(seed),
            max_learnts: 0.0,
            deadline: None,
            conflicts: 0,
            decisions: 0,
            propagations: 0,
        }
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    /// Allocates a fresh variable and returns its DIMACS index.
    pub fn new_var(&mut self) -> i32 {
        let v = self.assigns.len();
        self.ensure_vars(v + 1);
        (v + 1) as i32
    }

    fn ensure_vars(&mut self, n: usize) {
        while self.assigns.len() < n {
            let v = self.assigns.len();
            self.assigns.push(UNDEF);
            self.level.push(0);
            self.reason.push(NO_REASON);
            self.activity.push(0.0);
            self.polarity.push(true);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.heap.grow(v + 1);
            self.heap.insert(v, &self.activity);
        }
    }

    fn value(&self, l: Lit) -> u8 {
        let a = self.assigns[l.var()];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ l.neg() as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var();
        self.assigns[v] = !l.neg() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause of DIMACS literals. Returns false once the clause set
    /// is known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[i32]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let max_var = lits.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        self.ensure_vars(max_var);
        let mut c: Vec<Lit> = lits.iter().map(|&l| Lit::from_dimacs(l)).collect();
        c.sort_by_key(|l| l.0);
        c.dedup();
        let mut out = Vec::with_capacity(c.len());
        for (i, &l) in c.iter().enumerate() {
            if i + 1 < c.len() && c[i + 1] == !l {
                return true; // tautology
            }
            match self.value(l) {
                1 => return true,
                0 => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(out, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].idx()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].idx()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.polarity[v] = !l.neg();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = start;
    }

    /// Watched-literal propagation. Watch lists are indexed by the literal
    /// whose falsification must be reported.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref as usize;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == 1 {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != 0 {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.idx()].push(Watcher { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                if self.value(first) == 0 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                    self.qhead = self.trail.len();
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let mut cref = confl;
        loop {
            if self.clauses[cref as usize].learnt {
                self.bump_clause(cref);
            }
            let start = if p.is_some() { 1 } else { 0 };
            let n = self.clauses[cref as usize].lits.len();
            for k in start..n {
                let q = self.clauses[cref as usize].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            cref = self.reason[lit.var()];
            self.seen[lit.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.expect("uip");

        // Recursive minimization.
        let abstract_levels = learnt[1..].iter().fold(0u64, |acc, l| acc | 1 << (self.level[l.var()] & 63));
        let mut to_clear: Vec<usize> = learnt.iter().map(|l| l.var()).collect();
        let mut keep = vec![learnt[0]];
        for &l in &learnt[1..] {
            if self.reason[l.var()] == NO_REASON || !self.redundant(l, abstract_levels, &mut to_clear) {
                keep.push(l);
            }
        }
        for v in to_clear {
            self.seen[v] = false;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var()] > self.level[learnt[max_i].var()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var()]
        };
        (learnt, bt)
    }

    fn redundant(&mut self, p: Lit, abstract_levels: u64, to_clear: &mut Vec<usize>) -> bool {
        let mut stack = vec![p];
        let top = to_clear.len();
        while let Some(q) = stack.pop() {
            let cref = self.reason[q.var()] as usize;
            let n = self.clauses[cref].lits.len();
            for k in 1..n {
                let l = self.clauses[cref].lits[k];
                let v = l.var();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] != NO_REASON && (abstract_levels >> (self.level[v] & 63)) & 1 == 1 {
                    self.seen[v] = true;
                    stack.push(l);
                    to_clear.push(v);
                } else {
                    for &u in &to_clear[top..] {
                        self.seen[u] = false;
                    }
                    to_clear.truncate(top);
                    return false;
                }
            }
        }
        true
    }

    fn locked(&self, cref: u32) -> bool {
        let l = self.clauses[cref as usize].lits[0];
        self.reason[l.var()] == cref && self.value(l) == 1
    }

    fn reduce_db(&mut self) {
        let mut ls = std::mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            self.clauses[a as usize].activity.partial_cmp(&self.clauses[b as usize].activity).expect("finite")
        });
        let half = ls.len() / 2;
        let limit = self.cla_inc / ls.len().max(1) as f64;
        let mut kept = Vec::with_capacity(ls.len());
        for (i, &c) in ls.iter().enumerate() {
            let cl = &self.clauses[c as usize];
            let removable = cl.lits.len() > 2 && !self.locked(c) && (i < half || cl.activity < limit);
            if removable {
                let cl = &mut self.clauses[c as usize];
                cl.deleted = true;
                cl.lits = Vec::new();
            } else {
                kept.push(c);
            }
        }
        self.learnts = kept;
        let clauses = &self.clauses;
        for ws in &mut self.watches {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        let n = self.assigns.len();
        if n > 0 && self.rng.gen_bool(0.02) {
            let v = self.rng.gen_range(0..n);
            if self.assigns[v] == UNDEF {
                return Some(Lit((v as u32) << 1 | !self.polarity[v] as u32));
            }
        }
        while !self.heap.is_empty() {
            let v = self.heap.pop(&self.activity).expect("non-empty");
            if self.assigns[v] == UNDEF {
                return Some(Lit((v as u32) << 1 | !self.polarity[v] as u32));
            }
        }
        None
    }

    pub fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Solves under the given assumption literals. The clause database is
    /// kept, so more clauses may be added and `solve` called again.
    pub fn solve(&mut self, assumptions: &[i32]) -> SatResult {
        if !self.ok {
            return SatResult::Unsat;
        }
        let max_var = assumptions.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        self.ensure_vars(max_var);
        let assumptions: Vec<Lit> = assumptions.iter().map(|&l| Lit::from_dimacs(l)).collect();
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        }
        let mut restart = 0u64;
        let result = loop {
            let budget = (luby(2.0, restart) * 100.0) as u64;
            restart += 1;
            match self.search(budget, &assumptions) {
                Some(r) => break r,
                None => {
                    if self.out_of_time() {
                        break SatResult::Unknown;
                    }
                }
            }
        };
        self.cancel_until(0);
        result
    }

    fn search(&mut self, budget: u64, assumptions: &[Lit]) -> Option<SatResult> {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                local += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SatResult::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if self.conflicts.is_multiple_of(256) && self.out_of_time() {
                    return None;
                }
                continue;
            }
            if local >= budget {
                self.cancel_until(0);
                return None;
            }
            if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }
            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.value(a) {
                    1 => self.trail_lim.push(self.trail.len()),
                    0 => return Some(SatResult::Unsat),
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let next = match next {
                Some(l) => l,
                None => match self.pick_branch() {
                    Some(l) => l,
                    None => {
                        let model: Vec<bool> =
                            std::iter::once(false).chain(self.assigns.iter().map(|&a| a == 1)).collect();
                        self.model = model.clone();
                        return Some(SatResult::Sat(model));
                    }
                },
            };
            self.decisions += 1;
            if self.decisions.is_multiple_of(1024) && self.out_of_time() {
                self.cancel_until(0);
                return None;
            }
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, NO_REASON);
        }
    }

    /// Value of a DIMACS variable in the last satisfying assignment.
    pub fn model_value(&self, var: i32) -> Option<bool> {
        self.model.get(var as usize).copied()
    }

    /// Checks the last model against every problem clause still stored.
    pub fn verify_model(&self) -> bool {
        self.clauses.iter().filter(|c| !c.learnt && !c.deleted).all(|c| {
            c.lits.iter().any(|l| self.model.get(l.var() + 1).is_some_and(|&v| v != l.neg()))
        })
    }
}

/// One-shot solve of a formula. A returned model is checked against every
/// clause of `cnf` before it is handed out.
pub fn sat_solve(cnf: &CnfFormula) -> SatResult {
    sat_solve_with(cnf, 0, None)
}

pub fn sat_solve_with(cnf: &CnfFormula, seed: u64, deadline: Option<Instant>) -> SatResult {
    let mut s = Solver::with_seed(seed);
    s.set_deadline(deadline);
    s.ensure_vars(cnf.num_vars as usize);
    for c in &cnf.clauses {
        if !s.add_clause(c) {
            return SatResult::Unsat;
        }
    }
    match s.solve(&[]) {
        SatResult::Sat(mut model) => {
            model.resize(cnf.num_vars as usize + 1, false);
            assert!(cnf.satisfied_by(&model), "solver produced a model that violates the formula");
            SatResult::Sat(model)
        }
        other => other,
    }
}
