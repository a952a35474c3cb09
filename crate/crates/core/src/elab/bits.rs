// SPDX-License-Identifier: Apache-2.0

//! Word-level helpers over LSB-first bit vectors.

use crate::netlist::{Netlist, NodeRef, Result};

pub fn const_bits(value: u64, width: u32) -> Vec<NodeRef> {
    (0..width).map(|i| NodeRef::from_bool(i < 64 && (value >> i) & 1 == 1)).collect()
}

/// Bits needed to count from 0 to `max` inclusive.
pub fn width_for(max: u64) -> u32 {
    64 - max.leading_zeros()
}

pub fn add(n: &mut Netlist, a: &[NodeRef], b: &[NodeRef], carry_in: NodeRef) -> Result<Vec<NodeRef>> {
    debug_assert_eq!(a.len(), b.len());
    let mut carry = carry_in;
    let mut out = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        let p = n.xor(x, y)?;
        out.push(n.xor(p, carry)?);
        let g = n.add_and(x, y)?;
        let t = n.add_and(p, carry)?;
        carry = n.or(g, t)?;
    }
    Ok(out)
}

pub fn sub(n: &mut Netlist, a: &[NodeRef], b: &[NodeRef]) -> Result<Vec<NodeRef>> {
    let nb: Vec<NodeRef> = b.iter().map(|&x| !x).collect();
    add(n, a, &nb, NodeRef::TRUE)
}

pub fn increment(n: &mut Netlist, a: &[NodeRef]) -> Result<Vec<NodeRef>> {
    let zero = vec![NodeRef::FALSE; a.len()];
    add(n, a, &zero, NodeRef::TRUE)
}

pub fn decrement(n: &mut Netlist, a: &[NodeRef]) -> Result<Vec<NodeRef>> {
    let ones = vec![NodeRef::TRUE; a.len()];
    add(n, a, &ones, NodeRef::FALSE)
}

pub fn eq(n: &mut Netlist, a: &[NodeRef], b: &[NodeRef]) -> Result<NodeRef> {
    debug_assert_eq!(a.len(), b.len());
    let mut terms = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        terms.push(n.xnor(x, y)?);
    }
    n.and_all(terms)
}

pub fn eq_const(n: &mut Netlist, a: &[NodeRef], value: u64) -> Result<NodeRef> {
    let c = const_bits(value, a.len() as u32);
    eq(n, a, &c)
}

/// Unsigned `a < b`.
pub fn ult(n: &mut Netlist, a: &[NodeRef], b: &[NodeRef]) -> Result<NodeRef> {
    debug_assert_eq!(a.len(), b.len());
    let mut lt = NodeRef::FALSE;
    for (&x, &y) in a.iter().zip(b) {
        let here = n.add_and(!x, y)?;
        let same = n.xnor(x, y)?;
        let keep = n.add_and(same, lt)?;
        lt = n.or(here, keep)?;
    }
    Ok(lt)
}

pub fn mux(n: &mut Netlist, sel: NodeRef, t: &[NodeRef], e: &[NodeRef]) -> Result<Vec<NodeRef>> {
    debug_assert_eq!(t.len(), e.len());
    t.iter().zip(e).map(|(&x, &y)| n.mux(sel, x, y)).collect()
}

pub fn zip_with(
    n: &mut Netlist,
    a: &[NodeRef],
    b: &[NodeRef],
    f: fn(&mut Netlist, NodeRef, NodeRef) -> Result<NodeRef>,
) -> Result<Vec<NodeRef>> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| f(n, x, y)).collect()
}

/// MSB-first copy, the order used for named buses.
pub fn msb_first(bits: &[NodeRef]) -> Vec<NodeRef> {
    bits.iter().rev().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::Simulator;

    // Exhaustive 4-bit check against u64 arithmetic.
    #[test]
    fn arithmetic_matches_integers() {
        let mut n = Netlist::new();
        let a: Vec<NodeRef> = (0..4).map(|i| n.add_input(format!("a{i}")).unwrap()).collect();
        let b: Vec<NodeRef> = (0..4).map(|i| n.add_input(format!("b{i}")).unwrap()).collect();
        let s = add(&mut n, &a, &b, NodeRef::FALSE).unwrap();
        let d = sub(&mut n, &a, &b).unwrap();
        let e = eq(&mut n, &a, &b).unwrap();
        let l = ult(&mut n, &a, &b).unwrap();
        let inc = increment(&mut n, &a).unwrap();
        let dec = decrement(&mut n, &a).unwrap();
        let mut sim = Simulator::new(&n).unwrap();
        let word = |sim: &Simulator, bits: &[NodeRef]| {
            bits.iter().enumerate().fold(0u64, |acc, (i, &r)| acc | (sim.value(r) as u64) << i)
        };
        for x in 0..16u64 {
            for y in 0..16u64 {
                let inputs: Vec<bool> = (0..4).map(|i| x >> i & 1 == 1).chain((0..4).map(|i| y >> i & 1 == 1)).collect();
                sim.eval(&inputs);
                assert_eq!(word(&sim, &s), (x + y) % 16);
                assert_eq!(word(&sim, &d), x.wrapping_sub(y) % 16);
                assert_eq!(sim.value(e), x == y);
                assert_eq!(sim.value(l), x < y);
                assert_eq!(word(&sim, &inc), (x + 1) % 16);
                assert_eq!(word(&sim, &dec), (x + 15) % 16);
            }
        }
    }

    #[test]
    fn widths() {
        assert_eq!(width_for(0), 0);
        assert_eq!(width_for(1), 1);
        assert_eq!(width_for(8), 4);
        assert_eq!(width_for(1024), 11);
    }
}
