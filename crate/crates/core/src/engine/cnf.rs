// SPDX-License-Identifier: Apache-2.0

//! Clause containers. Literals are DIMACS integers.

use super::sat::Solver;

/// Anything clauses can be poured into: a plain formula or a live solver.
pub trait ClauseSink {
    fn new_var(&mut self) -> i32;
    fn add_clause(&mut self, lits: &[i32]);
}

/// Normalizes a clause: sorts, drops duplicates. Returns `None` for a
/// tautology.
pub fn normalize(lits: &[i32]) -> Option<Vec<i32>> {
    let mut c = lits.to_vec();
    c.sort_by_key(|l| (l.unsigned_abs(), *l < 0));
    c.dedup();
    if c.windows(2).any(|w| w[0] == -w[1]) {
        return None;
    }
    Some(c)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_literals(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    /// `model[v]` is the value of variable `v` (index 0 ignored).
    pub fn satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| model.get(l.unsigned_abs() as usize).is_some_and(|&v| v == (l > 0)))
        })
    }
}

impl ClauseSink for CnfFormula {
    fn new_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    fn add_clause(&mut self, lits: &[i32]) {
        if let Some(c) = normalize(lits) {
            debug_assert!(c.iter().all(|l| *l != 0 && l.unsigned_abs() <= self.num_vars));
            self.clauses.push(c);
        }
    }
}

impl ClauseSink for Solver {
    fn new_var(&mut self) -> i32 {
        Solver::new_var(self)
    }

    fn add_clause(&mut self, lits: &[i32]) {
        Solver::add_clause(self, lits);
    }
}
