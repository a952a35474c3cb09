// SPDX-License-Identifier: Apache-2.0

//! Semantic checks and expression width typing.
//!
//! Unsized literals take the width their context asks for. When no context
//! pins a width (both operands of a comparison are unsized), the smallest
//! width holding every literal in the subtree is used.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::ast::*;
use super::diag::{DiagCode, Diagnostic};

pub const MAX_WIDTH: u32 = 64;
pub const MAX_CAPACITY: u32 = 1024;

pub fn fits(value: u64, width: u32) -> bool {
    width >= 64 || value >> width == 0
}

fn bits_needed(value: u64) -> u32 {
    (64 - value.leading_zeros()).max(1)
}

/// Width of an expression determined by its leaves alone, ignoring context.
/// `None` when every leaf deciding the width is an unsized literal.
pub fn fixed_width(e: &Expr, lookup: &dyn Fn(&str) -> Option<u32>) -> Option<u32> {
    match &e.kind {
        ExprKind::Const { width, .. } => *width,
        ExprKind::Var(name) => lookup(name),
        ExprKind::Not(x) => fixed_width(x, lookup),
        ExprKind::Binary(op, _, _) if op.is_comparison() => Some(1),
        ExprKind::Binary(_, l, r) | ExprKind::Mux(_, l, r) => {
            fixed_width(l, lookup).or_else(|| fixed_width(r, lookup))
        }
    }
}

/// Smallest width holding every unsized literal of a width-free subtree.
fn literal_width(e: &Expr) -> u32 {
    match &e.kind {
        ExprKind::Const { value, width } => width.unwrap_or_else(|| bits_needed(*value)),
        ExprKind::Var(_) => 1,
        ExprKind::Not(x) => literal_width(x),
        ExprKind::Binary(op, _, _) if op.is_comparison() => 1,
        ExprKind::Binary(_, l, r) | ExprKind::Mux(_, l, r) => literal_width(l).max(literal_width(r)),
    }
}

/// Width at which the two operands of a binary operator or the arms of a mux
/// are evaluated. `expected` is the context width of the result (ignored for
/// comparisons, whose result is always 1 bit).
pub fn operand_width(
    op: Option<BinOp>,
    l: &Expr,
    r: &Expr,
    expected: Option<u32>,
    lookup: &dyn Fn(&str) -> Option<u32>,
) -> u32 {
    let ctx = if op.is_some_and(BinOp::is_comparison) { None } else { expected };
    fixed_width(l, lookup)
        .or_else(|| fixed_width(r, lookup))
        .or(ctx)
        .unwrap_or_else(|| literal_width(l).max(literal_width(r)))
}

/// Type-checks `e` against an optional expected width and returns its width.
pub fn type_expr(
    e: &Expr,
    expected: Option<u32>,
    lookup: &dyn Fn(&str) -> Option<u32>,
) -> Result<u32, Diagnostic> {
    let width = match &e.kind {
        ExprKind::Const { value, width: None } => {
            let w = expected.unwrap_or_else(|| bits_needed(*value));
            if !fits(*value, w) {
                return Err(Diagnostic::new(
                    DiagCode::ConstantOverflow,
                    e.span,
                    format!("constant {value} does not fit in {w} bits"),
                ));
            }
            return Ok(w);
        }
        ExprKind::Const { value, width: Some(w) } => {
            if *w == 0 || *w > MAX_WIDTH {
                return Err(Diagnostic::new(
                    DiagCode::WidthOutOfRange,
                    e.span,
                    format!("literal width {w} outside 1..{MAX_WIDTH}"),
                ));
            }
            if !fits(*value, *w) {
                return Err(Diagnostic::new(
                    DiagCode::ConstantOverflow,
                    e.span,
                    format!("constant {value} does not fit in {w} bits"),
                ));
            }
            *w
        }
        ExprKind::Var(name) => lookup(name).ok_or_else(|| {
            Diagnostic::new(DiagCode::UnknownIdentifier, e.span, format!("unknown variable '{name}'"))
        })?,
        ExprKind::Not(x) => type_expr(x, expected, lookup)?,
        ExprKind::Binary(op, l, r) => {
            let ow = operand_width(Some(*op), l, r, expected, lookup);
            type_expr(l, Some(ow), lookup)?;
            type_expr(r, Some(ow), lookup)?;
            if op.is_comparison() {
                1
            } else {
                ow
            }
        }
        ExprKind::Mux(c, a, b) => {
            type_expr(c, Some(1), lookup)?;
            let ow = operand_width(None, a, b, expected, lookup);
            type_expr(a, Some(ow), lookup)?;
            type_expr(b, Some(ow), lookup)?;
            ow
        }
    };
    match expected {
        Some(exp) if exp != width => Err(Diagnostic::new(
            DiagCode::WidthMismatch,
            e.span,
            format!("width mismatch: expected {exp} bits, found {width}"),
        )),
        _ => Ok(width),
    }
}

fn dup(diags: &mut Vec<Diagnostic>, seen: &mut HashSet<String>, id: &Ident, what: &str) {
    if !seen.insert(id.name.clone()) {
        diags.push(Diagnostic::new(
            DiagCode::DuplicateDeclaration,
            id.span,
            format!("duplicate {what} '{}'", id.name),
        ));
    }
}

fn check_width(diags: &mut Vec<Diagnostic>, width: u32, span: Span, name: &str) {
    if width == 0 || width > MAX_WIDTH {
        diags.push(Diagnostic::new(
            DiagCode::WidthOutOfRange,
            span,
            format!("width {width} of '{name}' outside 1..{MAX_WIDTH}"),
        ));
    }
}

struct ProcessChecker<'a> {
    proc_: &'a ProcessDecl,
    diags: Vec<Diagnostic>,
}

impl ProcessChecker<'_> {
    fn var_width(&self, name: &str) -> Option<u32> {
        self.proc_.var(name).map(|v| v.width)
    }

    fn expr(&mut self, e: &Expr, expected: Option<u32>, assigned: &BTreeSet<String>) {
        let p = self.proc_;
        let lookup = |n: &str| p.var(n).map(|v| v.width);
        if let Err(mut d) = type_expr(e, expected, &lookup) {
            if d.code == DiagCode::UnknownIdentifier {
                if let ExprKind::Var(name) = &e.kind {
                    if p.port(name).is_some() {
                        d.message = format!("port '{name}' cannot be read directly; pop it into a variable");
                    }
                }
            }
            self.diags.push(d);
            return;
        }
        self.reads(e, assigned);
    }

    fn reads(&mut self, e: &Expr, assigned: &BTreeSet<String>) {
        match &e.kind {
            ExprKind::Const { .. } => {}
            ExprKind::Var(name) => {
                if !assigned.contains(name) {
                    self.diags.push(Diagnostic::new(
                        DiagCode::UseBeforeAssign,
                        e.span,
                        format!("variable '{name}' may be read before it is assigned"),
                    ));
                }
            }
            ExprKind::Not(x) => self.reads(x, assigned),
            ExprKind::Binary(_, l, r) => {
                self.reads(l, assigned);
                self.reads(r, assigned);
            }
            ExprKind::Mux(c, a, b) => {
                self.reads(c, assigned);
                self.reads(a, assigned);
                self.reads(b, assigned);
            }
        }
    }

    fn target(&mut self, id: &Ident, need_one_bit: bool) -> Option<u32> {
        match self.var_width(&id.name) {
            Some(w) => {
                if need_one_bit && w != 1 {
                    self.diags.push(Diagnostic::new(
                        DiagCode::WidthMismatch,
                        id.span,
                        format!("status variable '{}' must be 1 bit, found {w}", id.name),
                    ));
                }
                Some(w)
            }
            None => {
                let msg = if self.proc_.port(&id.name).is_some() {
                    format!("port '{}' cannot be assigned; use push", id.name)
                } else {
                    format!("unknown variable '{}'", id.name)
                };
                self.diags.push(Diagnostic::new(DiagCode::UnknownIdentifier, id.span, msg));
                None
            }
        }
    }

    fn port(&mut self, id: &Ident, dir: Direction, op: &str) -> Option<u32> {
        match self.proc_.port(&id.name) {
            Some(p) if p.direction == dir => Some(p.width),
            Some(p) => {
                self.diags.push(Diagnostic::new(
                    DiagCode::Direction,
                    id.span,
                    format!("{op} on port '{}' which is declared '{}'", id.name, p.direction),
                ));
                None
            }
            None => {
                self.diags.push(Diagnostic::new(
                    DiagCode::UnknownIdentifier,
                    id.span,
                    format!("unknown port '{}'", id.name),
                ));
                None
            }
        }
    }

    fn same_width(&mut self, var: &Ident, vw: Option<u32>, port: &Ident, pw: Option<u32>) {
        if let (Some(vw), Some(pw)) = (vw, pw) {
            if vw != pw {
                self.diags.push(Diagnostic::new(
                    DiagCode::WidthMismatch,
                    var.span,
                    format!("variable '{}' is {vw} bits but port '{}' is {pw} bits", var.name, port.name),
                ));
            }
        }
    }

    fn block(&mut self, stmts: &[Stmt], mut assigned: BTreeSet<String>) -> BTreeSet<String> {
        for s in stmts {
            match s {
                Stmt::Assign { var, value, .. } => {
                    let w = self.target(var, false);
                    if w.is_some() {
                        self.expr(value, w, &assigned);
                    }
                    assigned.insert(var.name.clone());
                }
                Stmt::Pop { var, port, .. } => {
                    let vw = self.target(var, false);
                    let pw = self.port(port, Direction::In, "pop");
                    self.same_width(var, vw, port, pw);
                    assigned.insert(var.name.clone());
                }
                Stmt::PopNb { var, status, port, .. } => {
                    let vw = self.target(var, false);
                    self.target(status, true);
                    let pw = self.port(port, Direction::In, "popnb");
                    self.same_width(var, vw, port, pw);
                    assigned.insert(var.name.clone());
                    assigned.insert(status.name.clone());
                }
                Stmt::Push { port, value, .. } => {
                    if let Some(pw) = self.port(port, Direction::Out, "push") {
                        self.expr(value, Some(pw), &assigned);
                    }
                }
                Stmt::PushNb { status, port, value, .. } => {
                    self.target(status, true);
                    if let Some(pw) = self.port(port, Direction::Out, "pushnb") {
                        self.expr(value, Some(pw), &assigned);
                    }
                    assigned.insert(status.name.clone());
                }
                Stmt::If { cond, then_body, else_body, .. } => {
                    self.expr(cond, Some(1), &assigned);
                    let t = self.block(then_body, assigned.clone());
                    let e = self.block(else_body, assigned.clone());
                    assigned = t.intersection(&e).cloned().collect();
                }
            }
        }
        assigned
    }
}

fn check_process(p: &ProcessDecl) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = HashSet::new();
    for port in &p.ports {
        dup(&mut diags, &mut seen, &port.name, "port");
        check_width(&mut diags, port.width, port.name.span, &port.name.name);
    }
    for v in &p.vars {
        if p.port(&v.name.name).is_some() {
            diags.push(Diagnostic::new(
                DiagCode::DuplicateDeclaration,
                v.name.span,
                format!("variable '{}' shadows a port", v.name.name),
            ));
            seen.insert(v.name.name.clone());
        } else {
            dup(&mut diags, &mut seen, &v.name, "variable");
        }
        check_width(&mut diags, v.width, v.name.span, &v.name.name);
        if let Some(init) = v.init {
            if v.width <= MAX_WIDTH && !fits(init, v.width) {
                diags.push(Diagnostic::new(
                    DiagCode::ConstantOverflow,
                    v.span,
                    format!("initial value {init} does not fit in {} bits", v.width),
                ));
            }
        }
    }
    let mut checker = ProcessChecker { proc_: p, diags };
    let assigned: BTreeSet<String> =
        p.vars.iter().filter(|v| v.init.is_some()).map(|v| v.name.name.clone()).collect();
    checker.block(&p.body, assigned);
    checker.diags
}

/// Resolves an endpoint to its port declaration, reporting unknown names.
fn resolve<'a>(
    ast: &'a DesignAst,
    ep: &Endpoint,
    diags: &mut Vec<Diagnostic>,
) -> Option<&'a PortDecl> {
    let Some(inst) = ast.instance(&ep.instance.name) else {
        diags.push(Diagnostic::new(
            DiagCode::UnknownIdentifier,
            ep.instance.span,
            format!("unknown instance '{}'", ep.instance.name),
        ));
        return None;
    };
    // An unknown process was already reported at the instance.
    let proc_ = ast.process(&inst.process.name)?;
    let port = proc_.port(&ep.port.name);
    if port.is_none() {
        diags.push(Diagnostic::new(
            DiagCode::UnknownIdentifier,
            ep.port.span,
            format!("process '{}' has no port '{}'", proc_.name.name, ep.port.name),
        ));
    }
    port
}

/// Runs every semantic check. An empty result means the design may be
/// elaborated.
pub fn validate(ast: &DesignAst) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut procs = HashSet::new();
    for p in &ast.processes {
        dup(&mut diags, &mut procs, &p.name, "process");
        diags.extend(check_process(p));
    }

    // Instances, channels and externals share one namespace since all of
    // them name signals in the elaborated netlist.
    let mut names = HashSet::new();
    for inst in &ast.instances {
        dup(&mut diags, &mut names, &inst.name, "name");
        if ast.process(&inst.process.name).is_none() {
            diags.push(Diagnostic::new(
                DiagCode::UnknownIdentifier,
                inst.process.span,
                format!("unknown process '{}'", inst.process.name),
            ));
        }
    }

    let mut connections: HashMap<(String, String), usize> = HashMap::new();
    let mut connect = |diags: &mut Vec<Diagnostic>, ep: &Endpoint| {
        let n = connections.entry((ep.instance.name.clone(), ep.port.name.clone())).or_insert(0);
        *n += 1;
        if *n == 2 {
            diags.push(Diagnostic::new(
                DiagCode::DuplicateConnection,
                ep.port.span,
                format!("port '{ep}' is connected more than once"),
            ));
        }
    };

    for ch in &ast.channels {
        dup(&mut diags, &mut names, &ch.name, "name");
        if ch.capacity > MAX_CAPACITY {
            diags.push(Diagnostic::new(
                DiagCode::CapacityOutOfRange,
                ch.span,
                format!("capacity {} of channel '{}' exceeds {MAX_CAPACITY}", ch.capacity, ch.name),
            ));
        }
        let src = resolve(ast, &ch.src, &mut diags);
        let dst = resolve(ast, &ch.dst, &mut diags);
        if let Some(s) = src {
            if s.direction != Direction::Out {
                diags.push(Diagnostic::new(
                    DiagCode::Direction,
                    ch.src.port.span,
                    format!("channel '{}' source '{}' is not an out port", ch.name, ch.src),
                ));
            }
            connect(&mut diags, &ch.src);
        }
        if let Some(d) = dst {
            if d.direction != Direction::In {
                diags.push(Diagnostic::new(
                    DiagCode::Direction,
                    ch.dst.port.span,
                    format!("channel '{}' destination '{}' is not an in port", ch.name, ch.dst),
                ));
            }
            connect(&mut diags, &ch.dst);
        }
        if let (Some(s), Some(d)) = (src, dst) {
            if s.width != d.width {
                diags.push(Diagnostic::new(
                    DiagCode::WidthMismatch,
                    ch.name.span,
                    format!(
                        "channel '{}' joins '{}' ({} bits) to '{}' ({} bits)",
                        ch.name, ch.src, s.width, ch.dst, d.width
                    ),
                ));
            }
        }
    }

    for ext in &ast.externals {
        dup(&mut diags, &mut names, &ext.name, "name");
        if let Some(p) = resolve(ast, &ext.target, &mut diags) {
            if p.direction != ext.direction {
                diags.push(Diagnostic::new(
                    DiagCode::Direction,
                    ext.target.port.span,
                    format!(
                        "external {} '{}' bound to '{}' which is an {} port",
                        ext.direction, ext.name, ext.target, p.direction
                    ),
                ));
            }
            connect(&mut diags, &ext.target);
        }
    }

    for inst in &ast.instances {
        let Some(p) = ast.process(&inst.process.name) else { continue };
        for port in &p.ports {
            let key = (inst.name.name.clone(), port.name.name.clone());
            if !connections.contains_key(&key) {
                diags.push(Diagnostic::new(
                    DiagCode::UnconnectedPort,
                    inst.name.span,
                    format!("port '{}.{}' is not connected", inst.name, port.name),
                ));
            }
        }
    }
    diags
}
