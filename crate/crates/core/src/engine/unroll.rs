// SPDX-License-Identifier: Apache-2.0

//! Time-frame expansion of a netlist into CNF (Tseitin encoding).

use crate::netlist::{Netlist, Node, NodeRef, Result};

use super::cnf::ClauseSink;

/// Variable of every node in every encoded frame. Node 0 (constant false)
/// gets its own variable per frame, forced false by a unit clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrameMap {
    pub frames: Vec<Vec<i32>>,
}

impl FrameMap {
    pub fn var(&self, node: usize, frame: usize) -> i32 {
        self.frames[frame][node]
    }

    pub fn lit(&self, r: NodeRef, frame: usize) -> i32 {
        let v = self.var(r.index(), frame);
        if r.is_negated() {
            -v
        } else {
            v
        }
    }

    /// Sidecar text: one `node_index frame var` line per encoded node.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (t, frame) in self.frames.iter().enumerate() {
            for (node, &var) in frame.iter().enumerate() {
                s.push_str(&format!("{node} {t} {var}\n"));
            }
        }
        s
    }

    pub fn parse(text: &str) -> std::result::Result<FrameMap, String> {
        let mut m = FrameMap::default();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| s.parse::<i64>().map_err(|_| format!("line {}: bad number `{s}`", ln + 1));
            if f.len() != 3 {
                return Err(format!("line {}: expected `node frame var`", ln + 1));
            }
            let (node, frame, var) = (parse(f[0])?, parse(f[1])?, parse(f[2])?);
            if node < 0 || frame < 0 || var <= 0 || var > i32::MAX as i64 {
                return Err(format!("line {}: value out of range", ln + 1));
            }
            let (node, frame) = (node as usize, frame as usize);
            if m.frames.len() <= frame {
                m.frames.resize(frame + 1, Vec::new());
            }
            let fr = &mut m.frames[frame];
            if fr.len() <= node {
                fr.resize(node + 1, 0);
            }
            fr[node] = var as i32;
        }
        Ok(m)
    }
}

/// Rough literal count of encoding `frames` frames of `n`.
pub fn estimated_literals(n: &Netlist, frames: usize) -> u64 {
    let per = 1 + 4 * n.latches().len() as u64 + 7 * n.num_ands() as u64
        + n.constraints().len() as u64;
    per * frames as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitMode {
    /// Frame 0 latches take their reset values.
    Reset,
    /// Frame 0 latches are unconstrained.
    Free,
}

pub struct Unroller<'a> {
    netlist: &'a Netlist,
    ands: Vec<usize>,
    init: InitMode,
    map: FrameMap,
}

fn encode_and(sink: &mut impl ClauseSink, g: i32, a: i32, b: i32) {
    sink.add_clause(&[-g, a]);
    sink.add_clause(&[-g, b]);
    sink.add_clause(&[g, -a, -b]);
}

impl<'a> Unroller<'a> {
    pub fn new(netlist: &'a Netlist, init: InitMode) -> Result<Self> {
        netlist.validate()?;
        let ands = netlist
            .topo_order()?
            .into_iter()
            .filter(|&i| matches!(netlist.nodes()[i], Node::And(..)))
            .collect();
        Ok(Unroller { netlist, ands, init, map: FrameMap::default() })
    }

    pub fn netlist(&self) -> &'a Netlist {
        self.netlist
    }

    pub fn num_frames(&self) -> usize {
        self.map.frames.len()
    }

    pub fn map(&self) -> &FrameMap {
        &self.map
    }

    pub fn lit(&self, r: NodeRef, frame: usize) -> i32 {
        self.map.lit(r, frame)
    }

    /// Encodes the next frame, including its constraints, and returns its index.
    pub fn add_frame(&mut self, sink: &mut impl ClauseSink) -> usize {
        let n = self.netlist;
        let t = self.map.frames.len();
        let mut vars = vec![0i32; n.len()];
        let c = sink.new_var();
        sink.add_clause(&[-c]);
        vars[0] = c;
        for &i in n.inputs() {
            vars[i] = sink.new_var();
        }
        for &l in n.latches() {
            let v = sink.new_var();
            vars[l] = v;
            if t == 0 {
                if self.init == InitMode::Reset {
                    let init = matches!(n.nodes()[l], Node::Latch { init: true, .. });
                    sink.add_clause(&[if init { v } else { -v }]);
                }
            } else {
                let nx = self.map.lit(n.latch_next(l).expect("validated"), t - 1);
                sink.add_clause(&[-v, nx]);
                sink.add_clause(&[v, -nx]);
            }
        }
        let lit = |vars: &[i32], r: NodeRef| if r.is_negated() { -vars[r.index()] } else { vars[r.index()] };
        for &g in &self.ands {
            let Node::And(a, b) = n.nodes()[g] else { unreachable!() };
            let v = sink.new_var();
            vars[g] = v;
            let (la, lb) = (lit(&vars, a), lit(&vars, b));
            encode_and(sink, v, la, lb);
        }
        for &cons in n.constraints() {
            sink.add_clause(&[lit(&vars, cons)]);
        }
        self.map.frames.push(vars);
        t
    }
}
