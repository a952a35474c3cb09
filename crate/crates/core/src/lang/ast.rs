// SPDX-License-Identifier: Apache-2.0

use std::fmt;

/// Source location. Spans never participate in structural equality, so two
/// ASTs parsed from differently formatted text compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident { name: name.into(), span: Span::default() }
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "in",
            Direction::Out => "out",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortDecl {
    pub name: Ident,
    pub direction: Direction,
    pub width: u32,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: Ident,
    pub width: u32,
    pub init: Option<u64>,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    And,
    Or,
    Xor,
    Eq,
    Ne,
    Lt,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::And => "&",
            BinOp::Or => "|",
            BinOp::Xor => "^",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    /// `width: None` is an unsized literal that adopts its context's width.
    Const { value: u64, width: Option<u32> },
    Var(String),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Mux(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn constant(value: u64) -> Self {
        Expr { kind: ExprKind::Const { value, width: None }, span: Span::default() }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr { kind: ExprKind::Var(name.into()), span: Span::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Assign { var: Ident, value: Expr, span: Span },
    /// Blocking pop.
    Pop { var: Ident, port: Ident, span: Span },
    /// Non-blocking pop: `var` receives the data bus, `status` the handshake.
    PopNb { var: Ident, status: Ident, port: Ident, span: Span },
    /// Blocking push.
    Push { port: Ident, value: Expr, span: Span },
    PushNb { status: Ident, port: Ident, value: Expr, span: Span },
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Vec<Stmt>, span: Span },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Assign { span, .. }
            | Stmt::Pop { span, .. }
            | Stmt::PopNb { span, .. }
            | Stmt::Push { span, .. }
            | Stmt::PushNb { span, .. }
            | Stmt::If { span, .. } => *span,
        }
    }

    pub fn is_blocking(&self) -> bool {
        matches!(self, Stmt::Pop { .. } | Stmt::Push { .. })
    }

    /// The port this statement transfers on, if any.
    pub fn port(&self) -> Option<&Ident> {
        match self {
            Stmt::Pop { port, .. }
            | Stmt::PopNb { port, .. }
            | Stmt::Push { port, .. }
            | Stmt::PushNb { port, .. } => Some(port),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessDecl {
    pub name: Ident,
    pub ports: Vec<PortDecl>,
    pub vars: Vec<VarDecl>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

impl ProcessDecl {
    pub fn port(&self, name: &str) -> Option<&PortDecl> {
        self.ports.iter().find(|p| p.name.name == name)
    }

    pub fn var(&self, name: &str) -> Option<&VarDecl> {
        self.vars.iter().find(|v| v.name.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceDecl {
    pub name: Ident,
    pub process: Ident,
    pub span: Span,
}

/// `instance.port`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub instance: Ident,
    pub port: Ident,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.port)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelDecl {
    pub name: Ident,
    pub capacity: u32,
    pub src: Endpoint,
    pub dst: Endpoint,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExternalDecl {
    pub direction: Direction,
    pub name: Ident,
    pub target: Endpoint,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DesignAst {
    pub processes: Vec<ProcessDecl>,
    pub instances: Vec<InstanceDecl>,
    pub channels: Vec<ChannelDecl>,
    pub externals: Vec<ExternalDecl>,
}

impl DesignAst {
    pub fn process(&self, name: &str) -> Option<&ProcessDecl> {
        self.processes.iter().find(|p| p.name.name == name)
    }

    pub fn instance(&self, name: &str) -> Option<&InstanceDecl> {
        self.instances.iter().find(|i| i.name.name == name)
    }

    /// The process declaration behind an instance name.
    pub fn process_of(&self, instance: &str) -> Option<&ProcessDecl> {
        self.instance(instance).and_then(|i| self.process(&i.process.name))
    }
}
