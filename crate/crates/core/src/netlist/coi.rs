// SPDX-License-Identifier: Apache-2.0

use super::{Netlist, Node, NodeRef, Result};

impl Netlist {
    fn mark_cone(&self, roots: impl IntoIterator<Item = NodeRef>, keep: &mut [bool]) {
        let mut stack: Vec<usize> = roots.into_iter().map(NodeRef::index).collect();
        while let Some(idx) = stack.pop() {
            if keep[idx] {
                continue;
            }
            keep[idx] = true;
            match &self.nodes()[idx] {
                Node::And(a, b) => {
                    stack.push(a.index());
                    stack.push(b.index());
                }
                Node::Latch { next: Some(nx), .. } => stack.push(nx.index()),
                _ => {}
            }
        }
    }

    /// The sub-netlist that can influence `roots`.
    pub fn cone_of_influence(&self, roots: &[NodeRef]) -> Result<Netlist> {
        Ok(self.cone_with_map(roots)?.0)
    }

    /// Like [`Netlist::cone_of_influence`], also returning for each old node
    /// index its reference in the cone (if retained).
    ///
    /// A constraint is retained when its own cone shares a non-constant node
    /// with the retained set; bads are retained when their node is; buses are
    /// kept only when every bit is retained.
    pub fn cone_with_map(&self, roots: &[NodeRef]) -> Result<(Netlist, Vec<Option<NodeRef>>)> {
        for &r in roots {
            self.check(r)?;
        }
        let n = self.len();
        let mut keep = vec![false; n];
        self.mark_cone(roots.iter().copied(), &mut keep);
        keep[0] = true;

        let mut kept_constraints = vec![false; self.constraints().len()];
        loop {
            let mut changed = false;
            for (ci, &c) in self.constraints().iter().enumerate() {
                if kept_constraints[ci] {
                    continue;
                }
                let mut support = vec![false; n];
                self.mark_cone([c], &mut support);
                if support.iter().enumerate().skip(1).any(|(i, &s)| s && keep[i]) {
                    kept_constraints[ci] = true;
                    self.mark_cone([c], &mut keep);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut out = if self.is_strashed() { Netlist::new() } else { Netlist::without_strash() };
        let mut map: Vec<Option<NodeRef>> = vec![None; n];
        map[0] = Some(NodeRef::FALSE);
        for &idx in self.inputs() {
            if keep[idx] {
                map[idx] = Some(out.add_input(self.input_name(idx).unwrap_or_default())?);
            }
        }
        for &idx in self.latches() {
            if keep[idx] {
                if let Node::Latch { init, name, .. } = &self.nodes()[idx] {
                    map[idx] = Some(out.add_latch(*init, name.clone()));
                }
            }
        }
        let tr = |r: NodeRef, map: &[Option<NodeRef>]| {
            map[r.index()].map(|m| m.negate_if(r.is_negated()))
        };
        for idx in self.topo_order()? {
            if !keep[idx] {
                continue;
            }
            if let Node::And(a, b) = self.nodes()[idx] {
                let a = tr(a, &map).expect("operand in cone");
                let b = tr(b, &map).expect("operand in cone");
                map[idx] = Some(out.add_and(a, b)?);
            }
        }
        for &idx in self.latches() {
            if keep[idx] {
                if let Some(nx) = self.latch_next(idx) {
                    out.set_latch_next(map[idx].expect("latch"), tr(nx, &map).expect("next in cone"))?;
                }
            }
        }
        for (ci, &c) in self.constraints().iter().enumerate() {
            if kept_constraints[ci] {
                out.add_constraint(tr(c, &map).expect("constraint in cone"))?;
            }
        }
        for (name, b) in self.bads() {
            if let Some(r) = tr(*b, &map) {
                out.add_bad(name.clone(), r)?;
            }
        }
        for (name, bits) in self.buses() {
            let mapped: Option<Vec<NodeRef>> = bits.iter().map(|&b| tr(b, &map)).collect();
            if let Some(mapped) = mapped {
                out.set_bus(name.clone(), mapped)?;
            }
        }
        Ok((out, map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_root_keeps_one_node() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        let q = n.add_latch(false, "q");
        n.set_latch_next(q, a).unwrap();
        let cone = n.cone_of_influence(&[NodeRef::FALSE]).unwrap();
        assert_eq!(cone.len(), 1);
    }

    #[test]
    fn disconnected_latch_dropped() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        let used = n.add_latch(false, "used");
        n.set_latch_next(used, a).unwrap();
        let unused = n.add_latch(true, "unused");
        n.set_latch_next(unused, !unused).unwrap();
        n.add_bad("b", used).unwrap();
        let cone = n.cone_of_influence(&[used]).unwrap();
        assert_eq!(cone.latches().len(), 1);
        assert!(cone.nodes().iter().all(|nd| !matches!(nd, Node::Latch { name, .. } if name == "unused")));
        assert_eq!(cone.bads().len(), 1);
    }

    #[test]
    fn constraint_retained_through_shared_support() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        let b = n.add_input("b").unwrap();
        let c = n.add_input("c").unwrap();
        let ab = n.add_and(a, b).unwrap();
        n.add_constraint(!ab).unwrap(); // shares `a` with the root
        n.add_constraint(c).unwrap(); // disjoint
        let cone = n.cone_of_influence(&[a]).unwrap();
        assert_eq!(cone.constraints().len(), 1);
        assert!(cone.input("b").is_some());
        assert!(cone.input("c").is_none());
    }
}
