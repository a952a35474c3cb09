// SPDX-License-Identifier: Apache-2.0

pub mod corpus;
pub mod elab;
pub mod engine;
pub mod lang;
pub mod netlist;
pub mod pipeline;
pub mod wrappers;
