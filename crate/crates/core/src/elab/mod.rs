// SPDX-License-Identifier: Apache-2.0

//! Elaboration of a validated design into a single netlist.
//!
//! Naming in the output netlist:
//! - buses `inst.port.vld`, `inst.port.rdy`, `inst.port.dat` (MSB first),
//!   `inst.__stall`, `inst.__state`, `inst.<var>`, `chan.__occ`, and
//!   `X.vld`/`X.rdy`/`X.dat` for each external port `X`;
//! - free inputs `X.vld` and `X.dat[i]` for external In ports, `X.rdy` for
//!   external Out ports. There are no other inputs.

pub mod bits;
mod fifo;
mod process;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

pub use fifo::{build_fifo, channel_fifo, FifoSignals};
pub use process::MAX_STATES;

use crate::lang::{self, DesignAst, Diagnostic, Direction};
use crate::netlist::{Netlist, NetlistError, NodeRef};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NbStallMode {
    /// Idle while none of the module's rdy wires is asserted.
    #[default]
    Ready,
    /// Idle while no port completes a vld && rdy transfer.
    Handshake,
}

impl NbStallMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NbStallMode::Ready => "ready",
            NbStallMode::Handshake => "handshake",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElabOptions {
    /// Idle cycles after which a module without blocking ops counts as stalled.
    pub nb_stall_cycles: u64,
    pub nb_stall_mode: NbStallMode,
}

impl Default for ElabOptions {
    fn default() -> Self {
        ElabOptions { nb_stall_cycles: 8, nb_stall_mode: NbStallMode::Ready }
    }
}

#[derive(Debug, Error)]
pub enum ElabError {
    #[error("design has semantic errors: {}", .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Invalid(Vec<Diagnostic>),
    #[error("capacity-0 channels form a combinational cycle (channels: {})", .channels.join(", "))]
    CombinationalCycle { channels: Vec<String> },
    #[error("instance `{instance}` needs {states} FSM states, more than the limit of {}", MAX_STATES)]
    TooManyStates { instance: String, states: usize },
    #[error("instance `{instance}`: stall counter limit {cycles} is out of range")]
    StallCounter { instance: String, cycles: u64 },
    #[error("instance `{instance}`: port `{port}` is used more than once in the same cycle")]
    PortConflict { instance: String, port: String },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Handshake wires of one port. `dat` is LSB first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortSignals {
    pub vld: NodeRef,
    pub rdy: NodeRef,
    pub dat: Vec<NodeRef>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteKind {
    Pop,
    Push,
}

/// A blocking op and the FSM state code that waits on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockingSite {
    pub port: String,
    pub kind: SiteKind,
    pub state: u32,
}

#[derive(Clone, Debug)]
pub struct ElaboratedModule {
    pub instance: String,
    pub process: String,
    pub global_stall: NodeRef,
    pub ports: BTreeMap<String, PortSignals>,
    pub has_blocking: bool,
    /// State register, LSB first; empty for single-state FSMs.
    pub state: Vec<NodeRef>,
    pub num_states: usize,
    pub sites: Vec<BlockingSite>,
    pub vars: BTreeMap<String, Vec<NodeRef>>,
}

#[derive(Clone, Debug)]
pub struct ExternalPort {
    pub direction: Direction,
    pub instance: String,
    pub port: String,
    pub signals: PortSignals,
}

#[derive(Clone, Debug)]
pub struct ElaboratedDesign {
    pub netlist: Netlist,
    pub modules: Vec<ElaboratedModule>,
    pub external_ports: BTreeMap<String, ExternalPort>,
    /// Channel name to its occupancy bus name (FIFO channels only).
    pub channel_state: BTreeMap<String, String>,
}

impl ElaboratedDesign {
    pub fn module(&self, instance: &str) -> Option<&ElaboratedModule> {
        self.modules.iter().find(|m| m.instance == instance)
    }
}

fn remap(map: &[NodeRef], r: NodeRef) -> NodeRef {
    map[r.index()].negate_if(r.is_negated())
}

fn remap_port(map: &[NodeRef], s: &PortSignals) -> PortSignals {
    PortSignals {
        vld: remap(map, s.vld),
        rdy: remap(map, s.rdy),
        dat: s.dat.iter().map(|&b| remap(map, b)).collect(),
    }
}

pub fn elaborate(ast: &DesignAst, opts: &ElabOptions) -> Result<ElaboratedDesign, ElabError> {
    let diags = lang::validate(ast);
    if !diags.is_empty() {
        return Err(ElabError::Invalid(diags));
    }
    let mut n = Netlist::new();
    let mut logic = Vec::new();
    for inst in &ast.instances {
        let p = ast.process(&inst.process.name).expect("validated");
        logic.push(process::build_module(&mut n, &inst.name.name, p, opts)?);
    }
    let index: HashMap<&str, usize> =
        ast.instances.iter().enumerate().map(|(i, d)| (d.name.name.as_str(), i)).collect();
    let port = |inst: &str, port: &str| logic[index[inst]].ports[port].clone();

    let mut subst: HashMap<usize, NodeRef> = HashMap::new();
    let mut channel_state = BTreeMap::new();
    for ch in &ast.channels {
        let src = port(&ch.src.instance.name, &ch.src.port.name);
        let dst = port(&ch.dst.instance.name, &ch.dst.port.name);
        let name = &ch.name.name;
        if ch.capacity == 0 {
            subst.insert(dst.vld.index(), src.vld);
            for (d, s) in dst.dat.iter().zip(&src.dat) {
                subst.insert(d.index(), *s);
            }
            subst.insert(src.rdy.index(), dst.rdy);
        } else {
            let f = build_fifo(&mut n, name, ch.capacity, src.vld, &src.dat, dst.rdy)?;
            subst.insert(dst.vld.index(), f.out_vld);
            for (d, s) in dst.dat.iter().zip(&f.out_dat) {
                subst.insert(d.index(), *s);
            }
            subst.insert(src.rdy.index(), f.in_rdy);
            let bus = format!("{name}.__occ");
            n.set_bus(bus.clone(), bits::msb_first(&f.occupancy))?;
            channel_state.insert(name.clone(), bus);
        }
    }

    let mut external_ports = BTreeMap::new();
    for ext in &ast.externals {
        let name = &ext.name.name;
        let (inst, pname) = (&ext.target.instance.name, &ext.target.port.name);
        let sig = port(inst, pname);
        let signals = match ext.direction {
            Direction::In => {
                let vld = n.add_input(format!("{name}.vld"))?;
                subst.insert(sig.vld.index(), vld);
                let mut dat = Vec::new();
                for (i, d) in sig.dat.iter().enumerate() {
                    let x = n.add_input(format!("{name}.dat[{i}]"))?;
                    subst.insert(d.index(), x);
                    dat.push(x);
                }
                PortSignals { vld, rdy: sig.rdy, dat }
            }
            Direction::Out => {
                let rdy = n.add_input(format!("{name}.rdy"))?;
                subst.insert(sig.rdy.index(), rdy);
                PortSignals { vld: sig.vld, rdy, dat: sig.dat.clone() }
            }
        };
        external_ports.insert(
            name.clone(),
            ExternalPort { direction: ext.direction, instance: inst.clone(), port: pname.clone(), signals },
        );
    }

    debug_assert!(logic.iter().flat_map(|m| &m.placeholders).all(|p| subst.contains_key(&p.index())));
    let (mut netlist, map) = n.substitute_inputs(&subst).map_err(|e| match e {
        NetlistError::CombinationalCycle(_) => ElabError::CombinationalCycle {
            channels: ast.channels.iter().filter(|c| c.capacity == 0).map(|c| c.name.name.clone()).collect(),
        },
        other => ElabError::Netlist(other),
    })?;

    let mut modules = Vec::new();
    for (inst, m) in ast.instances.iter().zip(&logic) {
        let name = &inst.name.name;
        let ports: BTreeMap<String, PortSignals> =
            m.ports.iter().map(|(k, v)| (k.clone(), remap_port(&map, v))).collect();
        let state: Vec<NodeRef> = m.state.iter().map(|&b| remap(&map, b)).collect();
        let vars: BTreeMap<String, Vec<NodeRef>> =
            m.vars.iter().map(|(k, v)| (k.clone(), v.iter().map(|&b| remap(&map, b)).collect())).collect();
        let global_stall = remap(&map, m.global_stall);
        for (pname, sig) in &ports {
            netlist.set_bus(format!("{name}.{pname}.vld"), vec![sig.vld])?;
            netlist.set_bus(format!("{name}.{pname}.rdy"), vec![sig.rdy])?;
            netlist.set_bus(format!("{name}.{pname}.dat"), bits::msb_first(&sig.dat))?;
        }
        for (v, b) in &vars {
            if !v.starts_with("__") {
                netlist.set_bus(format!("{name}.{v}"), bits::msb_first(b))?;
            }
        }
        netlist.set_bus(format!("{name}.__stall"), vec![global_stall])?;
        if !state.is_empty() {
            netlist.set_bus(format!("{name}.__state"), bits::msb_first(&state))?;
        }
        modules.push(ElaboratedModule {
            instance: name.clone(),
            process: inst.process.name.clone(),
            global_stall,
            ports,
            has_blocking: m.has_blocking,
            state,
            num_states: m.num_states,
            sites: m.sites.clone(),
            vars,
        });
    }
    for ext in external_ports.values_mut() {
        ext.signals = remap_port(&map, &ext.signals);
    }
    for (name, ext) in &external_ports {
        netlist.set_bus(format!("{name}.vld"), vec![ext.signals.vld])?;
        netlist.set_bus(format!("{name}.rdy"), vec![ext.signals.rdy])?;
        netlist.set_bus(format!("{name}.dat"), bits::msb_first(&ext.signals.dat))?;
    }
    netlist.validate()?;
    Ok(ElaboratedDesign { netlist, modules, external_ports, channel_state })
}
