// SPDX-License-Identifier: Apache-2.0

//! Canonical pretty-printer. Binary operators are always parenthesized so the
//! output reparses to the same tree regardless of precedence.

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(ast: &DesignAst) -> String {
    let mut out = String::new();
    for p in &ast.processes {
        print_process(&mut out, p);
        out.push('\n');
    }
    out.push_str("design {\n");
    for i in &ast.instances {
        writeln!(out, "  inst {}: {};", i.name, i.process).ok();
    }
    for c in &ast.channels {
        writeln!(out, "  channel {} cap {}: {} -> {};", c.name, c.capacity, c.src, c.dst).ok();
    }
    for e in &ast.externals {
        writeln!(out, "  external {} {} = {};", e.direction, e.name, e.target).ok();
    }
    out.push_str("}\n");
    out
}

fn print_process(out: &mut String, p: &ProcessDecl) {
    writeln!(out, "process {} {{", p.name).ok();
    for port in &p.ports {
        writeln!(out, "  {} {}: {};", port.direction, port.name, port.width).ok();
    }
    for v in &p.vars {
        match v.init {
            Some(init) => writeln!(out, "  var {}: {} = {};", v.name, v.width, init).ok(),
            None => writeln!(out, "  var {}: {};", v.name, v.width).ok(),
        };
    }
    out.push_str("  body {\n");
    print_block(out, &p.body, 2);
    out.push_str("  }\n}\n");
}

fn print_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    let pad = "  ".repeat(depth);
    for s in stmts {
        match s {
            Stmt::Assign { var, value, .. } => {
                writeln!(out, "{pad}{var} = {};", expr_to_string(value)).ok();
            }
            Stmt::Pop { var, port, .. } => {
                writeln!(out, "{pad}{var} = pop({port});").ok();
            }
            Stmt::PopNb { var, status, port, .. } => {
                writeln!(out, "{pad}({var}, {status}) = popnb({port});").ok();
            }
            Stmt::Push { port, value, .. } => {
                writeln!(out, "{pad}push({port}, {});", expr_to_string(value)).ok();
            }
            Stmt::PushNb { status, port, value, .. } => {
                writeln!(out, "{pad}{status} = pushnb({port}, {});", expr_to_string(value)).ok();
            }
            Stmt::If { cond, then_body, else_body, .. } => {
                writeln!(out, "{pad}if ({}) {{", expr_to_string(cond)).ok();
                print_block(out, then_body, depth + 1);
                if else_body.is_empty() {
                    writeln!(out, "{pad}}}").ok();
                } else {
                    writeln!(out, "{pad}}} else {{").ok();
                    print_block(out, else_body, depth + 1);
                    writeln!(out, "{pad}}}").ok();
                }
            }
        }
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Const { value, width: None } => value.to_string(),
        ExprKind::Const { value, width: Some(w) } => format!("{w}'d{value}"),
        ExprKind::Var(name) => name.clone(),
        ExprKind::Not(x) => format!("~{}", expr_to_string(x)),
        ExprKind::Binary(op, l, r) => {
            format!("({} {} {})", expr_to_string(l), op.symbol(), expr_to_string(r))
        }
        ExprKind::Mux(c, a, b) => {
            format!("mux({}, {}, {})", expr_to_string(c), expr_to_string(a), expr_to_string(b))
        }
    }
}
