// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use super::{Netlist, NetlistError, Node, NodeRef, Result};

/// Latch values in latch-declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimState {
    pub latch_values: Vec<bool>,
}

impl SimState {
    pub fn initial(netlist: &Netlist) -> Self {
        let latch_values = netlist
            .latches()
            .iter()
            .map(|&i| matches!(netlist.nodes()[i], Node::Latch { init: true, .. }))
            .collect();
        SimState { latch_values }
    }
}

/// Two-valued cycle simulator over a validated netlist.
#[derive(Clone, Debug)]
pub struct Simulator<'a> {
    netlist: &'a Netlist,
    order: Vec<usize>,
    values: Vec<bool>,
    state: SimState,
}

impl<'a> Simulator<'a> {
    pub fn new(netlist: &'a Netlist) -> Result<Self> {
        netlist.validate()?;
        let order = netlist.topo_order()?;
        Ok(Simulator {
            netlist,
            order,
            values: vec![false; netlist.len()],
            state: SimState::initial(netlist),
        })
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.netlist
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn set_state(&mut self, state: SimState) -> Result<()> {
        let expected = self.netlist.latches().len();
        if state.latch_values.len() != expected {
            return Err(NetlistError::StateLength { expected, got: state.latch_values.len() });
        }
        self.state = state;
        Ok(())
    }

    pub fn reset(&mut self) {
        self.state = SimState::initial(self.netlist);
    }

    /// Evaluates the combinational logic for the current state and the
    /// given input values (in input-declaration order) without advancing.
    pub fn eval(&mut self, inputs: &[bool]) -> &[bool] {
        assert_eq!(inputs.len(), self.netlist.inputs().len(), "input vector length");
        for (&idx, &v) in self.netlist.inputs().iter().zip(inputs) {
            self.values[idx] = v;
        }
        for (&idx, &v) in self.netlist.latches().iter().zip(&self.state.latch_values) {
            self.values[idx] = v;
        }
        let nodes = self.netlist.nodes();
        for &idx in &self.order {
            if let Node::And(a, b) = nodes[idx] {
                let va = self.values[a.index()] ^ a.is_negated();
                let vb = self.values[b.index()] ^ b.is_negated();
                self.values[idx] = va && vb;
            }
        }
        self.values[0] = false;
        &self.values
    }

    /// Value of a reference after the last `eval`/`step`.
    pub fn value(&self, r: NodeRef) -> bool {
        self.values[r.index()] ^ r.is_negated()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// Evaluates the current cycle, then advances every latch.
    pub fn step(&mut self, inputs: &[bool]) -> &[bool] {
        self.eval(inputs);
        let next: Vec<bool> = self
            .netlist
            .latches()
            .iter()
            .map(|&idx| {
                let nx = self.netlist.latch_next(idx).expect("validated");
                self.values[nx.index()] ^ nx.is_negated()
            })
            .collect();
        self.state.latch_values = next;
        &self.values
    }
}

/// One simulation cycle: returns the successor state and the value of every
/// node (indexed by node index, non-negated) in the current cycle.
pub fn simulate_step(
    netlist: &Netlist,
    state: &SimState,
    input_values: &HashMap<String, bool>,
) -> Result<(SimState, Vec<bool>)> {
    let mut sim = Simulator::new(netlist)?;
    sim.set_state(state.clone())?;
    let inputs = netlist
        .inputs()
        .iter()
        .map(|&idx| {
            let name = netlist.input_name(idx).unwrap_or_default();
            input_values.get(name).copied().ok_or_else(|| NetlistError::MissingInput(name.to_string()))
        })
        .collect::<Result<Vec<bool>>>()?;
    let values = sim.step(&inputs).to_vec();
    Ok((sim.state.clone(), values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toggle() -> (Netlist, NodeRef) {
        let mut n = Netlist::new();
        let q = n.add_latch(false, "q");
        n.set_latch_next(q, !q).unwrap();
        (n, q)
    }

    #[test]
    fn toggle_latch_alternates() {
        let (n, q) = toggle();
        let mut sim = Simulator::new(&n).unwrap();
        let seen: Vec<bool> = (0..4).map(|_| { sim.step(&[]); sim.value(q) }).collect();
        // value observed during each cycle, before the latch advances
        assert_eq!(seen, vec![false, true, false, true]);
    }

    #[test]
    fn toggle_single_step() {
        let (n, q) = toggle();
        let (next, values) = simulate_step(&n, &SimState::initial(&n), &HashMap::new()).unwrap();
        assert!(!values[q.index()]);
        assert_eq!(next.latch_values, vec![true]);
    }

    #[test]
    fn constant_latch_holds() {
        let mut n = Netlist::new();
        let q = n.add_latch(true, "q");
        n.set_latch_next(q, q).unwrap();
        let mut sim = Simulator::new(&n).unwrap();
        for _ in 0..5 {
            sim.step(&[]);
            assert!(sim.value(q));
        }
    }

    #[test]
    fn and_identity_and_contradiction() {
        let mut n = Netlist::without_strash();
        let x = n.add_input("x").unwrap();
        let id = n.add_and(NodeRef::TRUE, x).unwrap();
        let contra = n.add_and(x, !x).unwrap();
        let mut sim = Simulator::new(&n).unwrap();
        for v in [false, true] {
            sim.eval(&[v]);
            assert_eq!(sim.value(id), v);
            assert!(!sim.value(contra));
        }
    }

    #[test]
    fn derived_or_truth_table() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        let b = n.add_input("b").unwrap();
        let o = n.or(a, b).unwrap();
        let mut sim = Simulator::new(&n).unwrap();
        for (va, vb) in [(false, false), (false, true), (true, false), (true, true)] {
            sim.eval(&[va, vb]);
            assert_eq!(sim.value(o), va || vb);
        }
    }

    /// 3-bit ripple incrementer built from AND/NOT only.
    #[test]
    fn three_bit_counter_reaches_seven() {
        let mut n = Netlist::new();
        let bits: Vec<NodeRef> = (0..3).map(|i| n.add_latch(false, format!("c{i}"))).collect();
        let mut carry = NodeRef::TRUE;
        for &b in &bits {
            let sum = n.xor(b, carry).unwrap();
            carry = n.add_and(b, carry).unwrap();
            n.set_latch_next(b, sum).unwrap();
        }
        let mut state = SimState::initial(&n);
        for _ in 0..7 {
            state = simulate_step(&n, &state, &HashMap::new()).unwrap().0;
        }
        assert_eq!(state.latch_values, vec![true, true, true]);
    }

    #[test]
    fn constant_netlist_ignores_inputs() {
        let mut n = Netlist::new();
        let _a = n.add_input("a").unwrap();
        let q = n.add_latch(false, "q");
        n.set_latch_next(q, NodeRef::TRUE).unwrap();
        for v in [false, true] {
            let inputs = HashMap::from([("a".to_string(), v)]);
            let (next, _) = simulate_step(&n, &SimState::initial(&n), &inputs).unwrap();
            assert_eq!(next.latch_values, vec![true]);
        }
    }

    #[test]
    fn missing_input_reported() {
        let mut n = Netlist::new();
        n.add_input("a").unwrap();
        let err = simulate_step(&n, &SimState::initial(&n), &HashMap::new()).unwrap_err();
        assert_eq!(err, NetlistError::MissingInput("a".into()));
    }
}
