// SPDX-License-Identifier: Apache-2.0

//! Reference oracles used by the test suites: a bit-parallel evaluator,
//! explicit-state reachability, random problem generators and exhaustive
//! SAT. Everything here favours obviousness over speed.

pub mod bfs;
pub mod brute;
pub mod eval;
pub mod gen;
