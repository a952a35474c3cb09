// SPDX-License-Identifier: Apache-2.0

//! Shift-register FIFO used for channels of capacity >= 1.
//!
//! Entry 0 is the head. A pop shifts every entry down by one; a push writes
//! at the first free slot after the shift. Slots at or beyond the occupancy
//! are kept at zero so equal contents always mean equal latch values.

use super::bits;
use crate::netlist::{Netlist, NodeRef, Result};

pub struct FifoSignals {
    /// Destination side: data available.
    pub out_vld: NodeRef,
    pub out_dat: Vec<NodeRef>,
    /// Source side: space available.
    pub in_rdy: NodeRef,
    /// Occupancy, LSB first.
    pub occupancy: Vec<NodeRef>,
}

pub fn build_fifo(
    n: &mut Netlist,
    name: &str,
    capacity: u32,
    in_vld: NodeRef,
    in_dat: &[NodeRef],
    out_rdy: NodeRef,
) -> Result<FifoSignals> {
    assert!(capacity >= 1, "capacity-0 channels are wired directly");
    let width = in_dat.len();
    let cap = capacity as usize;
    let cw = bits::width_for(capacity as u64);
    let count: Vec<NodeRef> = (0..cw).map(|i| n.add_latch(false, format!("{name}.__count[{i}]"))).collect();
    let entries: Vec<Vec<NodeRef>> = (0..cap)
        .map(|e| (0..width).map(|i| n.add_latch(false, format!("{name}.__entry{e}[{i}]"))).collect())
        .collect();

    let full = bits::eq_const(n, &count, capacity as u64)?;
    let empty = bits::eq_const(n, &count, 0)?;
    let in_rdy = !full;
    let out_vld = !empty;
    let push = n.add_and(in_vld, in_rdy)?;
    let pop = n.add_and(out_rdy, out_vld)?;

    // Write slot: count, or count-1 when a pop happens in the same cycle.
    let dec = bits::decrement(n, &count)?;
    let wpos = bits::mux(n, pop, &dec, &count)?;
    for e in 0..cap {
        let shifted: Vec<NodeRef> = if e + 1 < cap { entries[e + 1].clone() } else { vec![NodeRef::FALSE; width] };
        let kept = bits::mux(n, pop, &shifted, &entries[e])?;
        let at = bits::eq_const(n, &wpos, e as u64)?;
        let write = n.add_and(push, at)?;
        let next = bits::mux(n, write, in_dat, &kept)?;
        for (&l, &x) in entries[e].iter().zip(&next) {
            n.set_latch_next(l, x)?;
        }
    }

    let inc = bits::increment(n, &count)?;
    let after_push = bits::mux(n, push, &inc, &count)?;
    let after_push_dec = bits::decrement(n, &after_push)?;
    let next_count = bits::mux(n, pop, &after_push_dec, &after_push)?;
    for (&l, &x) in count.iter().zip(&next_count) {
        n.set_latch_next(l, x)?;
    }
    Ok(FifoSignals { out_vld, out_dat: entries[0].clone(), in_rdy, occupancy: count })
}

/// Standalone FIFO netlist with inputs `push.vld`, `push.dat[i]`, `pop.rdy`
/// and buses `push.rdy`, `pop.vld`, `pop.dat`, `__occ`.
pub fn channel_fifo(width: u32, capacity: u32) -> Result<Netlist> {
    assert!((1..=crate::lang::check::MAX_CAPACITY).contains(&capacity), "capacity out of range");
    assert!((1..=crate::lang::check::MAX_WIDTH).contains(&width), "width out of range");
    let mut n = Netlist::new();
    let vld = n.add_input("push.vld")?;
    let dat: Vec<NodeRef> = (0..width).map(|i| n.add_input(format!("push.dat[{i}]"))).collect::<Result<_>>()?;
    let rdy = n.add_input("pop.rdy")?;
    let f = build_fifo(&mut n, "fifo", capacity, vld, &dat, rdy)?;
    n.set_bus("push.rdy", vec![f.in_rdy])?;
    n.set_bus("pop.vld", vec![f.out_vld])?;
    n.set_bus("pop.dat", bits::msb_first(&f.out_dat))?;
    n.set_bus("__occ", bits::msb_first(&f.occupancy))?;
    Ok(n)
}
