// SPDX-License-Identifier: Apache-2.0

//! Compiles one process instance into FSM logic.
//!
//! States: an optional loop-head state (present when the body is empty or
//! does not begin with a blocking op) followed by one state per blocking
//! op in source order. A state's cycle runs its handshake and, if that
//! succeeds, everything after it up to the next blocking op or the end of
//! the body. Signals the module consumes (In vld/dat, Out rdy) are free
//! placeholder inputs here and get wired up by the caller.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::bits;
use super::{ElabError, ElabOptions, NbStallMode, PortSignals, SiteKind, BlockingSite};
use crate::lang::ast::*;
use crate::lang::check::operand_width;
use crate::netlist::{Netlist, NodeRef};

pub const MAX_STATES: usize = 1 << 16;

pub(crate) struct ModuleLogic {
    pub ports: BTreeMap<String, PortSignals>,
    pub global_stall: NodeRef,
    pub has_blocking: bool,
    pub state: Vec<NodeRef>,
    pub num_states: usize,
    pub sites: Vec<BlockingSite>,
    pub vars: BTreeMap<String, Vec<NodeRef>>,
    /// Inputs standing in for consumed signals, to be substituted.
    pub placeholders: Vec<NodeRef>,
}

type Env = Vec<Vec<NodeRef>>;
type Frames<'a> = Vec<(&'a [Stmt], usize)>;

#[derive(Default)]
struct PortAcc {
    /// Guards asserting rdy (In) or vld (Out).
    strobes: Vec<NodeRef>,
    /// Out ports: (guard, data) contributions.
    data: Vec<(NodeRef, Vec<NodeRef>)>,
}

struct Exit {
    guard: NodeRef,
    env: Env,
    target: usize,
}

struct Builder<'a> {
    n: &'a mut Netlist,
    inst: &'a str,
    proc_: &'a ProcessDecl,
    var_index: HashMap<&'a str, usize>,
    /// Signals as seen from inside the module (placeholders for consumed ones).
    ports: BTreeMap<String, PortSignals>,
    acc: BTreeMap<String, PortAcc>,
    site_of: HashMap<*const Stmt, usize>,
    head_state: usize,
    exits: Vec<Exit>,
}

fn collect_sites<'a>(block: &'a [Stmt], frames: &Frames<'a>, out: &mut Vec<(&'a Stmt, Frames<'a>)>) {
    for (i, s) in block.iter().enumerate() {
        let mut here = frames.clone();
        here.push((block, i + 1));
        match s {
            Stmt::Pop { .. } | Stmt::Push { .. } => out.push((s, here)),
            Stmt::If { then_body, else_body, .. } => {
                collect_sites(then_body, &here, out);
                collect_sites(else_body, &here, out);
            }
            _ => {}
        }
    }
}

impl<'a> Builder<'a> {
    fn conflict(&self, port: &Ident) -> ElabError {
        ElabError::PortConflict { instance: self.inst.to_string(), port: port.name.clone() }
    }

    fn touch(&self, seen: &mut BTreeSet<String>, port: &Ident) -> Result<(), ElabError> {
        if !seen.insert(port.name.clone()) {
            return Err(self.conflict(port));
        }
        Ok(())
    }

    fn width_of(&self, name: &str) -> Option<u32> {
        self.proc_.var(name).map(|v| v.width)
    }

    fn eval(&mut self, e: &Expr, width: u32, env: &Env) -> Result<Vec<NodeRef>, ElabError> {
        Ok(match &e.kind {
            ExprKind::Const { value, .. } => bits::const_bits(*value, width),
            ExprKind::Var(name) => env[self.var_index[name.as_str()]].clone(),
            ExprKind::Not(x) => self.eval(x, width, env)?.into_iter().map(|b| !b).collect(),
            ExprKind::Binary(op, l, r) => {
                let p = self.proc_;
                let lookup = |v: &str| p.var(v).map(|d| d.width);
                let ow = operand_width(Some(*op), l, r, Some(width), &lookup);
                let a = self.eval(l, ow, env)?;
                let b = self.eval(r, ow, env)?;
                let n = &mut *self.n;
                match op {
                    BinOp::Add => bits::add(n, &a, &b, NodeRef::FALSE)?,
                    BinOp::Sub => bits::sub(n, &a, &b)?,
                    BinOp::And => bits::zip_with(n, &a, &b, Netlist::add_and)?,
                    BinOp::Or => bits::zip_with(n, &a, &b, Netlist::or)?,
                    BinOp::Xor => bits::zip_with(n, &a, &b, Netlist::xor)?,
                    BinOp::Eq => vec![bits::eq(n, &a, &b)?],
                    BinOp::Ne => vec![!bits::eq(n, &a, &b)?],
                    BinOp::Lt => vec![bits::ult(n, &a, &b)?],
                }
            }
            ExprKind::Mux(c, a, b) => {
                let c = self.eval(c, 1, env)?[0];
                let a = self.eval(a, width, env)?;
                let b = self.eval(b, width, env)?;
                bits::mux(self.n, c, &a, &b)?
            }
        })
    }

    /// Executes a block under `guard`. Returns the guard under which control
    /// falls off the end; paths that reach a blocking op are recorded as
    /// exits instead.
    fn exec_block(
        &mut self,
        stmts: &'a [Stmt],
        mut guard: NodeRef,
        env: &mut Env,
        seen: &mut BTreeSet<String>,
    ) -> Result<NodeRef, ElabError> {
        for s in stmts {
            match s {
                Stmt::Assign { var, value, .. } => {
                    let w = self.width_of(&var.name).expect("validated");
                    let v = self.eval(value, w, env)?;
                    env[self.var_index[var.name.as_str()]] = v;
                }
                Stmt::PopNb { var, status, port, .. } => {
                    self.touch(seen, port)?;
                    let sig = self.ports[&port.name].clone();
                    self.acc.entry(port.name.clone()).or_default().strobes.push(guard);
                    env[self.var_index[var.name.as_str()]] = sig.dat;
                    env[self.var_index[status.name.as_str()]] = vec![sig.vld];
                }
                Stmt::PushNb { status, port, value, .. } => {
                    self.touch(seen, port)?;
                    let sig = self.ports[&port.name].clone();
                    let v = self.eval(value, sig.dat.len() as u32, env)?;
                    let acc = self.acc.entry(port.name.clone()).or_default();
                    acc.strobes.push(guard);
                    acc.data.push((guard, v));
                    env[self.var_index[status.name.as_str()]] = vec![sig.rdy];
                }
                Stmt::Pop { .. } | Stmt::Push { .. } => {
                    let target = self.site_of[&(s as *const Stmt)];
                    self.exits.push(Exit { guard, env: env.clone(), target });
                    return Ok(NodeRef::FALSE);
                }
                Stmt::If { cond, then_body, else_body, .. } => {
                    let c = self.eval(cond, 1, env)?[0];
                    let gt = self.n.add_and(guard, c)?;
                    let ge = self.n.add_and(guard, !c)?;
                    let mut env_t = env.clone();
                    let mut seen_t = seen.clone();
                    let ft = self.exec_block(then_body, gt, &mut env_t, &mut seen_t)?;
                    let mut env_e = env.clone();
                    let mut seen_e = seen.clone();
                    let fe = self.exec_block(else_body, ge, &mut env_e, &mut seen_e)?;
                    for (slot, (t, e)) in env.iter_mut().zip(env_t.into_iter().zip(env_e)) {
                        *slot = if t == e { t } else { bits::mux(self.n, ft, &t, &e)? };
                    }
                    seen.extend(seen_t);
                    seen.extend(seen_e);
                    guard = self.n.or(ft, fe)?;
                }
            }
        }
        Ok(guard)
    }

    /// Runs a continuation (innermost frame last) and records the exit back
    /// to the loop head for paths reaching the end of the body.
    fn exec_frames(
        &mut self,
        frames: &[(&'a [Stmt], usize)],
        mut guard: NodeRef,
        mut env: Env,
        mut seen: BTreeSet<String>,
    ) -> Result<(), ElabError> {
        for &(block, start) in frames.iter().rev() {
            guard = self.exec_block(&block[start..], guard, &mut env, &mut seen)?;
        }
        self.exits.push(Exit { guard, env, target: self.head_state });
        Ok(())
    }
}

pub(crate) fn build_module(
    n: &mut Netlist,
    inst: &str,
    p: &ProcessDecl,
    opts: &ElabOptions,
) -> Result<ModuleLogic, ElabError> {
    let mut placeholders = Vec::new();
    let mut ports = BTreeMap::new();
    for port in &p.ports {
        let name = &port.name.name;
        let w = port.width;
        let sig = match port.direction {
            Direction::In => {
                let vld = n.add_input(format!("{inst}.{name}.vld"))?;
                let dat: Vec<NodeRef> =
                    (0..w).map(|i| n.add_input(format!("{inst}.{name}.dat[{i}]"))).collect::<Result<_, _>>()?;
                placeholders.push(vld);
                placeholders.extend(&dat);
                PortSignals { vld, rdy: NodeRef::FALSE, dat }
            }
            Direction::Out => {
                let rdy = n.add_input(format!("{inst}.{name}.rdy"))?;
                placeholders.push(rdy);
                PortSignals { vld: NodeRef::FALSE, rdy, dat: vec![NodeRef::FALSE; w as usize] }
            }
        };
        ports.insert(name.clone(), sig);
    }

    let regs: Vec<Vec<NodeRef>> = p
        .vars
        .iter()
        .map(|v| {
            let init = v.init.unwrap_or(0);
            (0..v.width)
                .map(|i| n.add_latch((init >> i) & 1 == 1, format!("{inst}.{}[{i}]", v.name.name)))
                .collect()
        })
        .collect();

    let mut sites = Vec::new();
    collect_sites(&p.body, &Vec::new(), &mut sites);
    let has_head = p.body.first().is_none_or(|s| !s.is_blocking());
    let offset = has_head as usize;
    let num_states = sites.len() + offset;
    if num_states > MAX_STATES {
        return Err(ElabError::TooManyStates { instance: inst.to_string(), states: num_states });
    }
    let sw = bits::width_for(num_states as u64 - 1);
    let state: Vec<NodeRef> = (0..sw).map(|i| n.add_latch(false, format!("{inst}.__state[{i}]"))).collect();

    let site_of = sites.iter().enumerate().map(|(k, (s, _))| (*s as *const Stmt, k + offset)).collect();
    let var_index = p.vars.iter().enumerate().map(|(i, v)| (v.name.name.as_str(), i)).collect();
    let mut b = Builder {
        n,
        inst,
        proc_: p,
        var_index,
        ports,
        acc: BTreeMap::new(),
        site_of,
        head_state: 0,
        exits: Vec::new(),
    };

    let mut in_state = Vec::with_capacity(num_states);
    for code in 0..num_states {
        in_state.push(bits::eq_const(b.n, &state, code as u64)?);
    }

    if has_head {
        let mut env = regs.clone();
        let mut seen = BTreeSet::new();
        let g = b.exec_block(&p.body, in_state[0], &mut env, &mut seen)?;
        b.exits.push(Exit { guard: g, env, target: 0 });
    }

    let mut stall_terms = Vec::new();
    let mut site_info = Vec::new();
    for (k, (stmt, frames)) in sites.iter().enumerate() {
        let code = k + offset;
        let here = in_state[code];
        let mut env = regs.clone();
        let port = stmt.port().expect("blocking op has a port");
        let sig = b.ports[&port.name].clone();
        let (fire, kind) = match stmt {
            Stmt::Pop { var, .. } => {
                b.acc.entry(port.name.clone()).or_default().strobes.push(here);
                env[b.var_index[var.name.as_str()]] = sig.dat.clone();
                (b.n.add_and(here, sig.vld)?, SiteKind::Pop)
            }
            Stmt::Push { value, .. } => {
                let v = b.eval(value, sig.dat.len() as u32, &regs)?;
                let acc = b.acc.entry(port.name.clone()).or_default();
                acc.strobes.push(here);
                acc.data.push((here, v));
                (b.n.add_and(here, sig.rdy)?, SiteKind::Push)
            }
            _ => unreachable!(),
        };
        stall_terms.push(b.n.add_and(here, !fire)?);
        site_info.push(BlockingSite { port: port.name.clone(), kind, state: code as u32 });
        let seen = BTreeSet::from([port.name.clone()]);
        b.exec_frames(frames, fire, env, seen)?;
    }

    // Next-state and register updates: exits are mutually exclusive, and a
    // stalled cycle keeps everything.
    let mut next_state = state.clone();
    let mut next_regs = regs.clone();
    let exits = std::mem::take(&mut b.exits);
    for exit in exits.iter().rev() {
        if exit.guard == NodeRef::FALSE {
            continue;
        }
        let target = bits::const_bits(exit.target as u64, sw);
        next_state = bits::mux(b.n, exit.guard, &target, &next_state)?;
        for (slot, val) in next_regs.iter_mut().zip(&exit.env) {
            if slot != val {
                *slot = bits::mux(b.n, exit.guard, val, slot)?;
            }
        }
    }
    for (&l, &x) in state.iter().zip(&next_state) {
        b.n.set_latch_next(l, x)?;
    }
    for (reg, next) in regs.iter().zip(&next_regs) {
        for (&l, &x) in reg.iter().zip(next) {
            b.n.set_latch_next(l, x)?;
        }
    }

    // Produced port signals.
    let mut ports = std::mem::take(&mut b.ports);
    for port in &p.ports {
        let sig = ports.get_mut(&port.name.name).expect("declared");
        let acc = b.acc.remove(&port.name.name).unwrap_or_default();
        let strobe = b.n.or_all(acc.strobes)?;
        match port.direction {
            Direction::In => sig.rdy = strobe,
            Direction::Out => {
                sig.vld = strobe;
                let mut dat = vec![NodeRef::FALSE; port.width as usize];
                for (g, v) in acc.data.iter().rev() {
                    dat = bits::mux(b.n, *g, v, &dat)?;
                }
                sig.dat = dat;
            }
        }
    }

    let has_blocking = !sites.is_empty();
    let global_stall = if has_blocking {
        b.n.or_all(stall_terms)?
    } else {
        idle_counter(b.n, inst, &ports, opts)?
    };

    let vars = p.vars.iter().zip(regs).map(|(v, r)| (v.name.name.clone(), r)).collect();
    Ok(ModuleLogic {
        ports,
        global_stall,
        has_blocking,
        state,
        num_states,
        sites: site_info,
        vars,
        placeholders,
    })
}

/// Saturating idle counter for modules without blocking ops. Stall is the
/// registered condition `count == N`.
fn idle_counter(
    n: &mut Netlist,
    inst: &str,
    ports: &BTreeMap<String, PortSignals>,
    opts: &ElabOptions,
) -> Result<NodeRef, ElabError> {
    let limit = opts.nb_stall_cycles;
    if limit == 0 || limit > u32::MAX as u64 {
        return Err(ElabError::StallCounter { instance: inst.to_string(), cycles: limit });
    }
    let cw = bits::width_for(limit);
    let count: Vec<NodeRef> = (0..cw).map(|i| n.add_latch(false, format!("{inst}.__idle[{i}]"))).collect();
    let mut activity = Vec::new();
    for sig in ports.values() {
        match opts.nb_stall_mode {
            NbStallMode::Ready => activity.push(sig.rdy),
            NbStallMode::Handshake => activity.push(n.add_and(sig.vld, sig.rdy)?),
        }
    }
    let active = n.or_all(activity)?;
    let saturated = bits::eq_const(n, &count, limit)?;
    let inc = bits::increment(n, &count)?;
    let held = bits::mux(n, saturated, &count, &inc)?;
    let zero = vec![NodeRef::FALSE; cw as usize];
    let next = bits::mux(n, active, &zero, &held)?;
    for (&l, &x) in count.iter().zip(&next) {
        n.set_latch_next(l, x)?;
    }
    Ok(saturated)
}
