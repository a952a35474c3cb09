// SPDX-License-Identifier: Apache-2.0

//! Bit-level sequential netlist: an and-inverter graph with latches.
//!
//! Node 0 is always constant false; every other node is a free input, a
//! two-input AND, or a latch. Edges carry a complement flag, so constant
//! true is `!NodeRef::FALSE`. Multi-bit signals are metadata only (`buses`).

mod aiger;
mod coi;
mod sim;

pub use aiger::write_aag;
pub use sim::{simulate_step, SimState, Simulator};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Not;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetlistError {
    #[error("duplicate input name `{0}`")]
    DuplicateInput(String),
    #[error("node reference {0} is out of range")]
    OutOfRange(usize),
    #[error("node {0} is not a latch")]
    NotALatch(usize),
    #[error("next-state of latch `{0}` already set")]
    NextAlreadySet(String),
    #[error("latch `{0}` has no next-state function")]
    DanglingLatch(String),
    #[error("combinational cycle through node {0}")]
    CombinationalCycle(usize),
    #[error("no value supplied for input `{0}`")]
    MissingInput(String),
    #[error("simulation state has {got} latch values, netlist has {expected} latches")]
    StateLength { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, NetlistError>;

/// Complemented-edge reference to a node: `index << 1 | negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef(u32);

impl NodeRef {
    pub const FALSE: NodeRef = NodeRef(0);
    pub const TRUE: NodeRef = NodeRef(1);

    pub fn new(index: usize, negated: bool) -> Self {
        NodeRef(((index as u32) << 1) | negated as u32)
    }

    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// The non-complemented edge to the same node.
    pub fn regular(self) -> NodeRef {
        NodeRef(self.0 & !1)
    }

    pub fn is_const(self) -> bool {
        self.index() == 0
    }

    pub fn negate_if(self, cond: bool) -> NodeRef {
        NodeRef(self.0 ^ cond as u32)
    }

    pub fn from_bool(value: bool) -> NodeRef {
        if value {
            NodeRef::TRUE
        } else {
            NodeRef::FALSE
        }
    }
}

impl Not for NodeRef {
    type Output = NodeRef;
    fn not(self) -> NodeRef {
        NodeRef(self.0 ^ 1)
    }
}

impl fmt::Debug for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "!n{}", self.index())
        } else {
            write!(f, "n{}", self.index())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    ConstFalse,
    Input { name: String },
    And(NodeRef, NodeRef),
    Latch { init: bool, next: Option<NodeRef>, name: String },
}

#[derive(Clone, Debug)]
pub struct Netlist {
    nodes: Vec<Node>,
    inputs: Vec<usize>,
    latches: Vec<usize>,
    input_names: HashMap<String, usize>,
    strash: Option<HashMap<(NodeRef, NodeRef), usize>>,
    constraints: Vec<NodeRef>,
    bads: Vec<(String, NodeRef)>,
    buses: BTreeMap<String, Vec<NodeRef>>,
}

impl Default for Netlist {
    fn default() -> Self {
        Self::new()
    }
}

impl Netlist {
    /// An empty netlist with structural hashing and constant folding enabled.
    pub fn new() -> Self {
        Netlist {
            nodes: vec![Node::ConstFalse],
            inputs: Vec::new(),
            latches: Vec::new(),
            input_names: HashMap::new(),
            strash: Some(HashMap::new()),
            constraints: Vec::new(),
            bads: Vec::new(),
            buses: BTreeMap::new(),
        }
    }

    /// An empty netlist that allocates a fresh node for every `add_and`.
    pub fn without_strash() -> Self {
        Netlist { strash: None, ..Self::new() }
    }

    /// Builds a netlist from explicit parts, e.g. from an external reader.
    /// Nothing is checked here; call [`Netlist::validate`] before use.
    pub fn from_raw_parts(
        nodes: Vec<Node>,
        constraints: Vec<NodeRef>,
        bads: Vec<(String, NodeRef)>,
        buses: BTreeMap<String, Vec<NodeRef>>,
    ) -> Self {
        let mut inputs = Vec::new();
        let mut latches = Vec::new();
        let mut input_names = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            match node {
                Node::Input { name } => {
                    inputs.push(i);
                    input_names.insert(name.clone(), i);
                }
                Node::Latch { .. } => latches.push(i),
                _ => {}
            }
        }
        Netlist { nodes, inputs, latches, input_names, strash: None, constraints, bads, buses }
    }

    pub fn is_strashed(&self) -> bool {
        self.strash.is_some()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, r: NodeRef) -> &Node {
        &self.nodes[r.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    /// Input node indices in declaration order.
    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    /// Latch node indices in declaration order.
    pub fn latches(&self) -> &[usize] {
        &self.latches
    }

    pub fn num_ands(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::And(..))).count()
    }

    pub fn input(&self, name: &str) -> Option<NodeRef> {
        self.input_names.get(name).map(|&i| NodeRef::new(i, false))
    }

    pub fn input_name(&self, index: usize) -> Option<&str> {
        match &self.nodes[index] {
            Node::Input { name } => Some(name),
            _ => None,
        }
    }

    pub fn constraints(&self) -> &[NodeRef] {
        &self.constraints
    }

    pub fn bads(&self) -> &[(String, NodeRef)] {
        &self.bads
    }

    pub fn buses(&self) -> &BTreeMap<String, Vec<NodeRef>> {
        &self.buses
    }

    pub fn bus(&self, name: &str) -> Option<&[NodeRef]> {
        self.buses.get(name).map(Vec::as_slice)
    }

    fn check(&self, r: NodeRef) -> Result<()> {
        if r.index() < self.nodes.len() {
            Ok(())
        } else {
            Err(NetlistError::OutOfRange(r.index()))
        }
    }

    pub fn add_input(&mut self, name: impl Into<String>) -> Result<NodeRef> {
        let name = name.into();
        if self.input_names.contains_key(&name) {
            return Err(NetlistError::DuplicateInput(name));
        }
        let idx = self.nodes.len();
        self.input_names.insert(name.clone(), idx);
        self.nodes.push(Node::Input { name });
        self.inputs.push(idx);
        Ok(NodeRef::new(idx, false))
    }

    pub fn add_and(&mut self, a: NodeRef, b: NodeRef) -> Result<NodeRef> {
        self.check(a)?;
        self.check(b)?;
        if let Some(table) = &self.strash {
            if a == NodeRef::FALSE || b == NodeRef::FALSE || a == !b {
                return Ok(NodeRef::FALSE);
            }
            if a == NodeRef::TRUE || a == b {
                return Ok(b);
            }
            if b == NodeRef::TRUE {
                return Ok(a);
            }
            let key = if a <= b { (a, b) } else { (b, a) };
            if let Some(&idx) = table.get(&key) {
                return Ok(NodeRef::new(idx, false));
            }
        }
        let idx = self.nodes.len();
        self.nodes.push(Node::And(a, b));
        if let Some(table) = &mut self.strash {
            let key = if a <= b { (a, b) } else { (b, a) };
            table.insert(key, idx);
        }
        Ok(NodeRef::new(idx, false))
    }

    pub fn add_latch(&mut self, init: bool, name: impl Into<String>) -> NodeRef {
        let idx = self.nodes.len();
        self.nodes.push(Node::Latch { init, next: None, name: name.into() });
        self.latches.push(idx);
        NodeRef::new(idx, false)
    }

    pub fn set_latch_next(&mut self, latch: NodeRef, next: NodeRef) -> Result<()> {
        self.check(latch)?;
        self.check(next)?;
        match &mut self.nodes[latch.index()] {
            Node::Latch { next: slot @ None, .. } => {
                *slot = Some(next);
                Ok(())
            }
            Node::Latch { name, .. } => Err(NetlistError::NextAlreadySet(name.clone())),
            _ => Err(NetlistError::NotALatch(latch.index())),
        }
    }

    pub fn latch_next(&self, latch: usize) -> Option<NodeRef> {
        match &self.nodes[latch] {
            Node::Latch { next, .. } => *next,
            _ => None,
        }
    }

    pub fn add_constraint(&mut self, c: NodeRef) -> Result<()> {
        self.check(c)?;
        self.constraints.push(c);
        Ok(())
    }

    pub fn add_bad(&mut self, name: impl Into<String>, b: NodeRef) -> Result<()> {
        self.check(b)?;
        self.bads.push((name.into(), b));
        Ok(())
    }

    /// Registers a named bus (MSB first). Replaces an existing bus of the same name.
    pub fn set_bus(&mut self, name: impl Into<String>, bits_msb_first: Vec<NodeRef>) -> Result<()> {
        for &b in &bits_msb_first {
            self.check(b)?;
        }
        self.buses.insert(name.into(), bits_msb_first);
        Ok(())
    }

    pub fn or(&mut self, a: NodeRef, b: NodeRef) -> Result<NodeRef> {
        Ok(!self.add_and(!a, !b)?)
    }

    pub fn xor(&mut self, a: NodeRef, b: NodeRef) -> Result<NodeRef> {
        let both = self.add_and(a, b)?;
        let neither = self.add_and(!a, !b)?;
        self.add_and(!both, !neither)
    }

    pub fn xnor(&mut self, a: NodeRef, b: NodeRef) -> Result<NodeRef> {
        Ok(!self.xor(a, b)?)
    }

    /// `sel ? then_ : else_`
    pub fn mux(&mut self, sel: NodeRef, then_: NodeRef, else_: NodeRef) -> Result<NodeRef> {
        if then_ == else_ {
            self.check(sel)?;
            return Ok(then_);
        }
        let t = self.add_and(sel, then_)?;
        let e = self.add_and(!sel, else_)?;
        self.or(t, e)
    }

    pub fn and_all(&mut self, terms: impl IntoIterator<Item = NodeRef>) -> Result<NodeRef> {
        let mut acc = NodeRef::TRUE;
        for t in terms {
            acc = self.add_and(acc, t)?;
        }
        Ok(acc)
    }

    pub fn or_all(&mut self, terms: impl IntoIterator<Item = NodeRef>) -> Result<NodeRef> {
        let mut acc = NodeRef::FALSE;
        for t in terms {
            acc = self.or(acc, t)?;
        }
        Ok(acc)
    }

    /// Topological order of all nodes with latch outputs treated as sources.
    pub fn topo_order(&self) -> Result<Vec<usize>> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.nodes.len();
        let mut color = vec![WHITE; n];
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<(usize, u8)> = Vec::new();
        for root in 0..n {
            if color[root] != WHITE {
                continue;
            }
            stack.push((root, 0));
            color[root] = GREY;
            while let Some(&mut (idx, ref mut child)) = stack.last_mut() {
                let operands = match &self.nodes[idx] {
                    Node::And(a, b) => [Some(*a), Some(*b)],
                    _ => [None, None],
                };
                if (*child as usize) < 2 {
                    let c = operands[*child as usize];
                    *child += 1;
                    if let Some(c) = c {
                        let ci = c.index();
                        if ci >= n {
                            return Err(NetlistError::OutOfRange(ci));
                        }
                        match color[ci] {
                            WHITE => {
                                color[ci] = GREY;
                                stack.push((ci, 0));
                            }
                            GREY => return Err(NetlistError::CombinationalCycle(ci)),
                            _ => {}
                        }
                    }
                } else {
                    color[idx] = BLACK;
                    order.push(idx);
                    stack.pop();
                }
            }
        }
        Ok(order)
    }

    /// Checks reference ranges, latch completeness and combinational acyclicity.
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.nodes.first(), Some(Node::ConstFalse)) {
            return Err(NetlistError::OutOfRange(0));
        }
        for node in &self.nodes {
            match node {
                Node::And(a, b) => {
                    self.check(*a)?;
                    self.check(*b)?;
                }
                Node::Latch { next: Some(nx), .. } => self.check(*nx)?,
                Node::Latch { next: None, name, .. } => {
                    return Err(NetlistError::DanglingLatch(name.clone()))
                }
                _ => {}
            }
        }
        for &c in &self.constraints {
            self.check(c)?;
        }
        for (_, b) in &self.bads {
            self.check(*b)?;
        }
        for bits in self.buses.values() {
            for &b in bits {
                self.check(b)?;
            }
        }
        self.topo_order().map(|_| ())
    }

    /// Copies every node of `self` into `target`, returning the old-index to
    /// new-reference map. Inputs are resolved through `bind_input`; unbound
    /// inputs become fresh inputs named `prefix + name`. Latches and buses
    /// are renamed with `prefix`; constraints are carried over, bads are not.
    pub fn instantiate_into(
        &self,
        target: &mut Netlist,
        prefix: &str,
        mut bind_input: impl FnMut(&str) -> Option<NodeRef>,
    ) -> Result<Vec<NodeRef>> {
        let order = self.topo_order()?;
        let mut map = vec![NodeRef::FALSE; self.nodes.len()];
        for &idx in &self.latches {
            if let Node::Latch { init, name, .. } = &self.nodes[idx] {
                map[idx] = target.add_latch(*init, format!("{prefix}{name}"));
            }
        }
        for &idx in &self.inputs {
            let name = self.input_name(idx).unwrap_or_default();
            map[idx] = match bind_input(name) {
                Some(r) => r,
                None => target.add_input(format!("{prefix}{name}"))?,
            };
        }
        for idx in order {
            if let Node::And(a, b) = self.nodes[idx] {
                let a = map[a.index()].negate_if(a.is_negated());
                let b = map[b.index()].negate_if(b.is_negated());
                map[idx] = target.add_and(a, b)?;
            }
        }
        let tr = |r: NodeRef| map[r.index()].negate_if(r.is_negated());
        for &idx in &self.latches {
            let next = self.latch_next(idx).ok_or_else(|| match &self.nodes[idx] {
                Node::Latch { name, .. } => NetlistError::DanglingLatch(name.clone()),
                _ => NetlistError::NotALatch(idx),
            })?;
            target.set_latch_next(map[idx], tr(next))?;
        }
        for &c in &self.constraints {
            target.add_constraint(tr(c))?;
        }
        for (name, bits) in &self.buses {
            target.set_bus(format!("{prefix}{name}"), bits.iter().map(|&b| tr(b)).collect())?;
        }
        Ok(map)
    }

    /// Rebuilds the netlist with some inputs replaced by other signals of the
    /// same netlist. Substitutions may chain; a substitution that makes a
    /// signal depend combinationally on itself is reported as a cycle.
    /// Returns the rebuilt netlist and the old-index to new-reference map.
    pub fn substitute_inputs(
        &self,
        subst: &HashMap<usize, NodeRef>,
    ) -> Result<(Netlist, Vec<NodeRef>)> {
        let mut out = if self.strash.is_some() { Netlist::new() } else { Netlist::without_strash() };
        let n = self.nodes.len();
        let mut map: Vec<Option<NodeRef>> = vec![None; n];
        map[0] = Some(NodeRef::FALSE);
        for &idx in &self.inputs {
            if !subst.contains_key(&idx) {
                let name = self.input_name(idx).unwrap_or_default().to_string();
                map[idx] = Some(out.add_input(name)?);
            }
        }
        for &idx in &self.latches {
            if let Node::Latch { init, name, .. } = &self.nodes[idx] {
                map[idx] = Some(out.add_latch(*init, name.clone()));
            }
        }
        let mut on_stack = vec![false; n];
        for root in 0..n {
            self.resolve(root, subst, &mut map, &mut on_stack, &mut out)?;
        }
        let tr = |r: NodeRef| map[r.index()].expect("resolved").negate_if(r.is_negated());
        for &idx in &self.latches {
            let next = self.latch_next(idx).ok_or_else(|| match &self.nodes[idx] {
                Node::Latch { name, .. } => NetlistError::DanglingLatch(name.clone()),
                _ => NetlistError::NotALatch(idx),
            })?;
            out.set_latch_next(map[idx].expect("latch"), tr(next))?;
        }
        for &c in &self.constraints {
            out.add_constraint(tr(c))?;
        }
        for (name, b) in &self.bads {
            out.add_bad(name.clone(), tr(*b))?;
        }
        for (name, bits) in &self.buses {
            out.set_bus(name.clone(), bits.iter().map(|&b| tr(b)).collect())?;
        }
        let map = map.into_iter().map(|m| m.expect("resolved")).collect();
        Ok((out, map))
    }

    fn resolve(
        &self,
        root: usize,
        subst: &HashMap<usize, NodeRef>,
        map: &mut [Option<NodeRef>],
        on_stack: &mut [bool],
        out: &mut Netlist,
    ) -> Result<()> {
        if map[root].is_some() {
            return Ok(());
        }
        let deps = |idx: usize| -> [Option<NodeRef>; 2] {
            match &self.nodes[idx] {
                Node::And(a, b) => [Some(*a), Some(*b)],
                Node::Input { .. } => [Some(subst[&idx]), None],
                _ => unreachable!("sources are pre-mapped"),
            }
        };
        // (node, next operand to visit); on_stack marks the current DFS path.
        let mut stack = vec![(root, 0usize)];
        on_stack[root] = true;
        while let Some(&mut (idx, ref mut child)) = stack.last_mut() {
            let ops = deps(idx);
            if *child < 2 {
                let c = ops[*child];
                *child += 1;
                if let Some(c) = c {
                    let ci = c.index();
                    if map[ci].is_none() {
                        if on_stack[ci] {
                            return Err(NetlistError::CombinationalCycle(ci));
                        }
                        on_stack[ci] = true;
                        stack.push((ci, 0));
                    }
                }
                continue;
            }
            let get = |r: NodeRef| map[r.index()].expect("dependency resolved").negate_if(r.is_negated());
            let value = match &self.nodes[idx] {
                Node::And(a, b) => {
                    let (a, b) = (get(*a), get(*b));
                    out.add_and(a, b)?
                }
                Node::Input { .. } => get(subst[&idx]),
                _ => unreachable!(),
            };
            map[idx] = Some(value);
            on_stack[idx] = false;
            stack.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_input_follows_constant() {
        let mut n = Netlist::new();
        let r = n.add_input("clk_en").unwrap();
        assert_eq!(r.index(), 1);
        assert!(!r.is_negated());
    }

    #[test]
    fn duplicate_input_rejected() {
        let mut n = Netlist::new();
        n.add_input("a").unwrap();
        assert_eq!(n.add_input("a"), Err(NetlistError::DuplicateInput("a".into())));
    }

    #[test]
    fn distinct_inputs_get_distinct_indices() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        let b = n.add_input("b").unwrap();
        assert_ne!(a.index(), b.index());
    }

    #[test]
    fn and_rejects_out_of_range() {
        let mut n = Netlist::new();
        assert_eq!(n.add_and(NodeRef::new(7, false), NodeRef::TRUE), Err(NetlistError::OutOfRange(7)));
    }

    #[test]
    fn strash_reuses_commuted_and() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        let b = n.add_input("b").unwrap();
        let x = n.add_and(a, !b).unwrap();
        let y = n.add_and(!b, a).unwrap();
        assert_eq!(x, y);
        let mut raw = Netlist::without_strash();
        let a = raw.add_input("a").unwrap();
        let b = raw.add_input("b").unwrap();
        assert_ne!(raw.add_and(a, b).unwrap(), raw.add_and(a, b).unwrap());
    }

    #[test]
    fn dangling_latch_detected() {
        let mut n = Netlist::new();
        n.add_latch(false, "q");
        assert_eq!(n.validate(), Err(NetlistError::DanglingLatch("q".into())));
    }

    #[test]
    fn next_set_twice_rejected() {
        let mut n = Netlist::new();
        let q = n.add_latch(false, "q");
        n.set_latch_next(q, !q).unwrap();
        assert_eq!(n.set_latch_next(q, q), Err(NetlistError::NextAlreadySet("q".into())));
    }

    #[test]
    fn raw_cycle_rejected() {
        let nodes = vec![
            Node::ConstFalse,
            Node::Input { name: "a".into() },
            Node::And(NodeRef::new(1, false), NodeRef::new(3, false)),
            Node::And(NodeRef::new(2, true), NodeRef::new(1, false)),
        ];
        let n = Netlist::from_raw_parts(nodes, vec![], vec![], BTreeMap::new());
        assert!(matches!(n.validate(), Err(NetlistError::CombinationalCycle(_))));
    }

    #[test]
    fn raw_forward_reference_is_fine_when_acyclic() {
        let nodes = vec![
            Node::ConstFalse,
            Node::And(NodeRef::new(2, false), NodeRef::new(3, true)),
            Node::Input { name: "a".into() },
            Node::Input { name: "b".into() },
        ];
        let n = Netlist::from_raw_parts(nodes, vec![], vec![], BTreeMap::new());
        n.validate().unwrap();
        let order = n.topo_order().unwrap();
        let pos = |i| order.iter().position(|&x| x == i).unwrap();
        assert!(pos(1) > pos(2) && pos(1) > pos(3));
    }

    #[test]
    fn substitution_cycle_detected() {
        let mut n = Netlist::new();
        let p = n.add_input("p").unwrap();
        let q = n.add_input("q").unwrap();
        let x = n.add_and(p, q).unwrap();
        let mut subst = HashMap::new();
        subst.insert(p.index(), !x);
        assert!(matches!(n.substitute_inputs(&subst), Err(NetlistError::CombinationalCycle(_))));
    }

    #[test]
    fn substitution_shared_operand_is_not_a_cycle() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        let b = n.add_input("b").unwrap();
        let p = n.add_input("p").unwrap();
        let x = n.add_and(a, b).unwrap();
        let y = n.add_and(x, p).unwrap();
        n.set_bus("y", vec![y]).unwrap();
        let mut subst = HashMap::new();
        subst.insert(p.index(), x);
        let (out, map) = n.substitute_inputs(&subst).unwrap();
        assert_eq!(out.inputs().len(), 2);
        assert_eq!(map[y.index()], map[x.index()]);
    }

    #[test]
    fn substitution_chains_through_inputs() {
        let mut n = Netlist::new();
        let p = n.add_input("p").unwrap();
        let q = n.add_input("q").unwrap();
        let r = n.add_input("r").unwrap();
        let x = n.add_and(p, r).unwrap();
        n.set_bus("x", vec![x]).unwrap();
        let mut subst = HashMap::new();
        subst.insert(p.index(), !q);
        subst.insert(q.index(), !r);
        let (out, _) = n.substitute_inputs(&subst).unwrap();
        assert_eq!(out.inputs().len(), 1);
        // x = !!r & r = r
        assert_eq!(out.bus("x").unwrap()[0], out.input("r").unwrap());
    }
}
