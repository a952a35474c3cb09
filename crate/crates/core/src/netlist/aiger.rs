// SPDX-License-Identifier: Apache-2.0

//! ASCII AIGER ("aag") dump for cross-tool debugging.
//!
//! Variables are numbered inputs first, then latches, then AND gates in
//! topological order. Bads are emitted as outputs; constraints, when
//! present, use the AIGER 1.9 `C` section (header `aag M I L O A 0 C`).

use std::fmt::Write;

use super::{Netlist, Node, NodeRef, Result};

pub fn write_aag(netlist: &Netlist) -> Result<String> {
    netlist.validate()?;
    let n = netlist.len();
    let mut var = vec![0u32; n];
    let mut next_var = 1u32;
    for &i in netlist.inputs() {
        var[i] = next_var;
        next_var += 1;
    }
    for &l in netlist.latches() {
        var[l] = next_var;
        next_var += 1;
    }
    let ands: Vec<usize> = netlist
        .topo_order()?
        .into_iter()
        .filter(|&i| matches!(netlist.nodes()[i], Node::And(..)))
        .collect();
    for &a in &ands {
        var[a] = next_var;
        next_var += 1;
    }
    let lit = |r: NodeRef| 2 * var[r.index()] + r.is_negated() as u32;

    let (i, l, o, a) = (netlist.inputs().len(), netlist.latches().len(), netlist.bads().len(), ands.len());
    let c = netlist.constraints().len();
    let m = next_var - 1;
    let mut out = String::new();
    if c == 0 {
        writeln!(out, "aag {m} {i} {l} {o} {a}").ok();
    } else {
        writeln!(out, "aag {m} {i} {l} {o} {a} 0 {c}").ok();
    }
    for &idx in netlist.inputs() {
        writeln!(out, "{}", 2 * var[idx]).ok();
    }
    for &idx in netlist.latches() {
        if let Node::Latch { init, next: Some(nx), .. } = &netlist.nodes()[idx] {
            if *init {
                writeln!(out, "{} {} 1", 2 * var[idx], lit(*nx)).ok();
            } else {
                writeln!(out, "{} {}", 2 * var[idx], lit(*nx)).ok();
            }
        }
    }
    for (_, b) in netlist.bads() {
        writeln!(out, "{}", lit(*b)).ok();
    }
    for &cr in netlist.constraints() {
        writeln!(out, "{}", lit(cr)).ok();
    }
    for &idx in &ands {
        if let Node::And(x, y) = netlist.nodes()[idx] {
            let (x, y) = (lit(x), lit(y));
            let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
            writeln!(out, "{} {} {}", 2 * var[idx], hi, lo).ok();
        }
    }
    for (k, &idx) in netlist.inputs().iter().enumerate() {
        writeln!(out, "i{k} {}", netlist.input_name(idx).unwrap_or_default()).ok();
    }
    for (k, &idx) in netlist.latches().iter().enumerate() {
        if let Node::Latch { name, .. } = &netlist.nodes()[idx] {
            writeln!(out, "l{k} {name}").ok();
        }
    }
    for (k, (name, _)) in netlist.bads().iter().enumerate() {
        writeln!(out, "o{k} {name}").ok();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_sections() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        let q = n.add_latch(true, "q");
        let g = n.add_and(a, !q).unwrap();
        n.set_latch_next(q, g).unwrap();
        n.add_bad("bad", !g).unwrap();
        let text = write_aag(&n).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "aag 3 1 1 1 1");
        assert_eq!(lines[1], "2");
        assert_eq!(lines[2], "4 6 1");
        assert_eq!(lines[3], "7");
        assert_eq!(lines[4], "6 5 2");
        assert_eq!(&lines[5..], &["i0 a", "l0 q", "o0 bad"]);
    }

    #[test]
    fn constraints_use_extended_header() {
        let mut n = Netlist::new();
        let a = n.add_input("a").unwrap();
        n.add_constraint(a).unwrap();
        let text = write_aag(&n).unwrap();
        assert!(text.starts_with("aag 1 1 0 0 0 0 1\n2\n2\n"));
    }
}
