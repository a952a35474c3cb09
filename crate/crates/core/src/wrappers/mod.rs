// SPDX-License-Identifier: Apache-2.0

//! Check models over an elaborated design.
//!
//! The invalid-input model is a miter of two copies (`ref.*`, `test.*`)
//! that see the same valid inputs but independent data whenever the input
//! is invalid. The deadlock model is a single copy in an environment that
//! never blocks it, with the conjunction of all module stalls as the bad.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::elab::{bits, ElaboratedDesign};
use crate::lang::Direction;
use crate::netlist::{Netlist, NetlistError, NodeRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    InvalidInput,
    Deadlock,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::InvalidInput => "invalid-input",
            ModelKind::Deadlock => "deadlock",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvValid {
    /// External In valids are held at 1.
    #[default]
    Constrained,
    /// External In valids are left free.
    Free,
}

impl EnvValid {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvValid::Constrained => "constrained",
            EnvValid::Free => "free",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InvalidInputOptions {
    /// Also flag a divergence of the rdy signals of external In ports.
    pub strict_input_ready: bool,
    /// Build the copies in the opposite order with their invalid-data
    /// sources exchanged.
    pub swap_roles: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DeadlockOptions {
    pub env_valid: EnvValid,
}

#[derive(Debug, Error)]
pub enum WrapperError {
    #[error("the invalid-input check needs at least one external in port and one external out port")]
    NoExternalPorts,
    #[error("the deadlock check needs at least one module")]
    NoModules,
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// A netlist with named bads, ready for the engine.
#[derive(Clone, Debug)]
pub struct CheckModel {
    pub netlist: Netlist,
    pub kind: ModelKind,
    /// Trace-level signals (check-level names and port-level buses), MSB first.
    pub signal_map: BTreeMap<String, Vec<NodeRef>>,
    /// Latches of the two miter copies that implement the same design
    /// latch, as (ref, test). Empty for the deadlock model.
    pub correspondence: Vec<(NodeRef, NodeRef)>,
}

impl CheckModel {
    /// Wraps a netlist that already carries its bads, e.g. a generated one.
    pub fn from_netlist(netlist: Netlist, kind: ModelKind) -> Self {
        let signal_map = netlist.buses().clone();
        CheckModel { netlist, kind, signal_map, correspondence: Vec::new() }
    }

    pub fn bads(&self) -> &[(String, NodeRef)] {
        self.netlist.bads()
    }
}

fn is_trace_bus(name: &str) -> bool {
    name.ends_with(".vld") || name.ends_with(".rdy") || name.ends_with(".dat") || name.ends_with(".__stall")
}

fn collect_signals(n: &Netlist, extra: &[String]) -> BTreeMap<String, Vec<NodeRef>> {
    n.buses()
        .iter()
        .filter(|(k, _)| is_trace_bus(k) || extra.contains(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

pub fn build_invalid_input_model(
    elab: &ElaboratedDesign,
    opts: &InvalidInputOptions,
) -> Result<CheckModel, WrapperError> {
    let ins: Vec<_> = elab.external_ports.iter().filter(|(_, p)| p.direction == Direction::In).collect();
    let outs: Vec<_> = elab.external_ports.iter().filter(|(_, p)| p.direction == Direction::Out).collect();
    if ins.is_empty() || outs.is_empty() {
        return Err(WrapperError::NoExternalPorts);
    }
    let mut n = Netlist::new();
    let mut bind_ref: HashMap<String, NodeRef> = HashMap::new();
    let mut bind_test: HashMap<String, NodeRef> = HashMap::new();
    let mut extra = Vec::new();
    for (name, port) in &ins {
        let w = port.signals.dat.len();
        let v = n.add_input(format!("{name}.vld"))?;
        let mut shared = Vec::new();
        let mut inv = [Vec::new(), Vec::new()];
        for i in 0..w {
            shared.push(n.add_input(format!("{name}.dat[{i}]"))?);
        }
        for (k, tag) in ["ref", "test"].iter().enumerate() {
            for i in 0..w {
                inv[k].push(n.add_input(format!("{name}.dat_inv_{tag}[{i}]"))?);
            }
        }
        let (r_inv, t_inv) = if opts.swap_roles { (1, 0) } else { (0, 1) };
        bind_ref.insert(format!("{name}.vld"), v);
        bind_test.insert(format!("{name}.vld"), v);
        for i in 0..w {
            let mr = n.mux(v, shared[i], inv[r_inv][i])?;
            let mt = n.mux(v, shared[i], inv[t_inv][i])?;
            bind_ref.insert(format!("{name}.dat[{i}]"), mr);
            bind_test.insert(format!("{name}.dat[{i}]"), mt);
        }
        n.set_bus(format!("{name}.vld"), vec![v])?;
        n.set_bus(format!("{name}.dat"), bits::msb_first(&shared))?;
        n.set_bus(format!("{name}.dat_inv_ref"), bits::msb_first(&inv[0]))?;
        n.set_bus(format!("{name}.dat_inv_test"), bits::msb_first(&inv[1]))?;
        extra.push(format!("{name}.dat_inv_ref"));
        extra.push(format!("{name}.dat_inv_test"));
    }
    for (name, _) in &outs {
        let r = n.add_input(format!("{name}.rdy"))?;
        bind_ref.insert(format!("{name}.rdy"), r);
        bind_test.insert(format!("{name}.rdy"), r);
        n.set_bus(format!("{name}.rdy"), vec![r])?;
    }

    let src = &elab.netlist;
    let (ref_map, test_map) = if opts.swap_roles {
        let t = src.instantiate_into(&mut n, "test.", |s| bind_test.get(s).copied())?;
        let r = src.instantiate_into(&mut n, "ref.", |s| bind_ref.get(s).copied())?;
        (r, t)
    } else {
        let r = src.instantiate_into(&mut n, "ref.", |s| bind_ref.get(s).copied())?;
        let t = src.instantiate_into(&mut n, "test.", |s| bind_test.get(s).copied())?;
        (r, t)
    };
    debug_assert_eq!(n.inputs().len(), src.inputs().len() + ins.iter().map(|(_, p)| 2 * p.signals.dat.len()).sum::<usize>());
    let tr = |map: &[NodeRef], r: NodeRef| map[r.index()].negate_if(r.is_negated());

    for (name, port) in &outs {
        let s = &port.signals;
        let (rv, tv) = (tr(&ref_map, s.vld), tr(&test_map, s.vld));
        let rd: Vec<NodeRef> = s.dat.iter().map(|&b| tr(&ref_map, b)).collect();
        let td: Vec<NodeRef> = s.dat.iter().map(|&b| tr(&test_map, b)).collect();
        let b1 = n.xor(rv, tv)?;
        n.add_bad(format!("__bad.B1.{name}"), b1)?;
        let both = n.add_and(rv, tv)?;
        let same = bits::eq(&mut n, &rd, &td)?;
        let b2 = n.add_and(both, !same)?;
        n.add_bad(format!("__bad.B2.{name}"), b2)?;
    }
    if opts.strict_input_ready {
        for (name, port) in &ins {
            let s = &port.signals;
            let b3 = n.xor(tr(&ref_map, s.rdy), tr(&test_map, s.rdy))?;
            n.add_bad(format!("__bad.B3.{name}"), b3)?;
        }
    }

    let correspondence =
        src.latches().iter().map(|&l| (ref_map[l], test_map[l])).collect();
    let signal_map = collect_signals(&n, &extra);
    n.validate()?;
    Ok(CheckModel { netlist: n, kind: ModelKind::InvalidInput, signal_map, correspondence })
}

pub fn build_deadlock_model(
    elab: &ElaboratedDesign,
    opts: &DeadlockOptions,
) -> Result<CheckModel, WrapperError> {
    if elab.modules.is_empty() {
        return Err(WrapperError::NoModules);
    }
    let mut n = Netlist::new();
    let map = elab.netlist.instantiate_into(&mut n, "", |_| None)?;
    for (name, port) in &elab.external_ports {
        match port.direction {
            Direction::In => {
                if opts.env_valid == EnvValid::Constrained {
                    let v = n.input(&format!("{name}.vld")).expect("external input");
                    n.add_constraint(v)?;
                }
            }
            Direction::Out => {
                let r = n.input(&format!("{name}.rdy")).expect("external input");
                n.add_constraint(r)?;
            }
        }
    }
    let stalls: Vec<NodeRef> =
        elab.modules.iter().map(|m| map[m.global_stall.index()].negate_if(m.global_stall.is_negated())).collect();
    let all = n.and_all(stalls)?;
    n.add_bad("__bad.deadlock", all)?;
    let signal_map = collect_signals(&n, &[]);
    n.validate()?;
    Ok(CheckModel { netlist: n, kind: ModelKind::Deadlock, signal_map, correspondence: Vec::new() })
}
