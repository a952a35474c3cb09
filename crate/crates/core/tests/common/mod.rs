// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::collections::HashMap;

use lichk_core::netlist::{Netlist, Simulator};

/// Drives a netlist by input name and reads buses as integers.
pub struct Harness<'a> {
    pub sim: Simulator<'a>,
    netlist: &'a Netlist,
    inputs: Vec<bool>,
    index: HashMap<String, usize>,
}

impl<'a> Harness<'a> {
    pub fn new(netlist: &'a Netlist) -> Self {
        let index = netlist
            .inputs()
            .iter()
            .enumerate()
            .map(|(k, &i)| (netlist.input_name(i).unwrap().to_string(), k))
            .collect();
        Harness {
            sim: Simulator::new(netlist).unwrap(),
            netlist,
            inputs: vec![false; netlist.inputs().len()],
            index,
        }
    }

    pub fn set(&mut self, name: &str, v: bool) {
        let k = *self.index.get(name).unwrap_or_else(|| panic!("no input {name}"));
        self.inputs[k] = v;
    }

    /// Sets `prefix[i]` for i in 0..width from the bits of `value`.
    pub fn set_word(&mut self, prefix: &str, width: u32, value: u64) {
        for i in 0..width {
            self.set(&format!("{prefix}[{i}]"), (value >> i) & 1 == 1);
        }
    }

    pub fn eval(&mut self) {
        self.sim.eval(&self.inputs);
    }

    /// Evaluates the current cycle and advances; bus reads afterwards see
    /// the values of the cycle just evaluated.
    pub fn step(&mut self) {
        self.sim.step(&self.inputs);
    }

    pub fn bus(&self, name: &str) -> u64 {
        let bits = self.netlist.bus(name).unwrap_or_else(|| panic!("no bus {name}"));
        bits.iter().fold(0, |acc, &b| (acc << 1) | self.sim.value(b) as u64)
    }

    pub fn bit(&self, name: &str) -> bool {
        self.bus(name) == 1
    }
}

pub fn corpus_text(name: &str) -> String {
    let path = format!("{}/corpus/{name}.li", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}
