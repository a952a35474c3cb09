// SPDX-License-Identifier: Apache-2.0

//! Lexer and recursive-descent parser. Syntax errors stop the parse and are
//! returned as diagnostics; semantic checks live in `check`.

use super::ast::*;
use super::diag::{DiagCode, Diagnostic};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sized { width: u32, value: u64 },
    Punct(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(v) => format!("'{v}'"),
            Tok::Sized { width, value } => format!("'{width}'d{value}'"),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

// Longest first so that "==" wins over "=".
const PUNCT: &[&str] = &[
    "->", "==", "!=", "{", "}", "(", ")", ";", ":", ",", ".", "=", "+", "-", "&", "|", "^", "~", "<",
];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span { start: self.pos, end: self.pos, line: self.line, col: self.col }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek_char() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.src[self.pos..].starts_with("//") => {
                    while let Some(c) = self.peek_char() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn digits(&mut self, radix: u32) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek_char() {
            if c.is_digit(radix) || c == '_' {
                if c != '_' {
                    s.push(c);
                }
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn next_token(&mut self) -> Result<Token, Diagnostic> {
        self.skip_trivia();
        let mut span = self.here();
        let Some(c) = self.peek_char() else {
            return Ok(Token { tok: Tok::Eof, span });
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(c) = self.peek_char() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let text = self.digits(10);
            let number = text.parse::<u64>().map_err(|_| {
                Diagnostic::new(DiagCode::Syntax, span, format!("integer literal '{text}' out of range"))
            })?;
            if self.peek_char() == Some('\'') {
                self.bump();
                let radix = match self.bump() {
                    Some('d') => 10,
                    Some('b') => 2,
                    Some('h') => 16,
                    _ => {
                        return Err(Diagnostic::new(
                            DiagCode::Syntax,
                            span,
                            "expected base 'd', 'b' or 'h' in sized literal",
                        ))
                    }
                };
                let body = self.digits(radix);
                let value = u64::from_str_radix(&body, radix).map_err(|_| {
                    Diagnostic::new(DiagCode::Syntax, span, "malformed sized literal")
                })?;
                let width = u32::try_from(number).unwrap_or(u32::MAX);
                Tok::Sized { width, value }
            } else {
                Tok::Int(number)
            }
        } else {
            let rest = &self.src[self.pos..];
            match PUNCT.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    for _ in 0..p.len() {
                        self.bump();
                    }
                    Tok::Punct(p)
                }
                None => {
                    return Err(Diagnostic::new(
                        DiagCode::Syntax,
                        span,
                        format!("unexpected character '{c}'"),
                    ))
                }
            }
        };
        span.end = self.pos;
        Ok(Token { tok, span })
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer { src, pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        let t = lx.next_token()?;
        let eof = t.tok == Tok::Eof;
        out.push(t);
        if eof {
            return Ok(out);
        }
    }
}

const KEYWORDS: &[&str] = &[
    "process", "design", "body", "in", "out", "var", "pop", "popnb", "push", "pushnb", "if", "else",
    "channel", "cap", "external", "inst", "mux",
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(Diagnostic::new(
            DiagCode::Syntax,
            self.span(),
            format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.advance().span)
        } else {
            self.error(&format!("'{kw}'"))
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        if self.is_punct(p) {
            Ok(self.advance().span)
        } else {
            self.error(&format!("'{p}'"))
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                let span = self.advance().span;
                Ok(Ident { name, span })
            }
            _ => self.error("identifier"),
        }
    }

    fn int(&mut self) -> PResult<u64> {
        match *self.peek() {
            Tok::Int(v) => {
                self.advance();
                Ok(v)
            }
            _ => self.error("integer"),
        }
    }

    fn width(&mut self) -> PResult<u32> {
        let v = self.int()?;
        Ok(u32::try_from(v).unwrap_or(u32::MAX))
    }

    fn close(&self, mut span: Span) -> Span {
        span.end = self.prev_end().max(span.start);
        span
    }

    fn design(&mut self) -> PResult<DesignAst> {
        let mut ast = DesignAst::default();
        loop {
            if self.is_kw("process") {
                ast.processes.push(self.process()?);
            } else if self.is_kw("design") {
                break;
            } else {
                return self.error("'process' or 'design'");
            }
        }
        self.expect_kw("design")?;
        self.expect_punct("{")?;
        while !self.is_punct("}") {
            let start = self.span();
            if self.is_kw("inst") {
                self.advance();
                let name = self.ident()?;
                self.expect_punct(":")?;
                let process = self.ident()?;
                self.expect_punct(";")?;
                ast.instances.push(InstanceDecl { name, process, span: self.close(start) });
            } else if self.is_kw("channel") {
                self.advance();
                let name = self.ident()?;
                self.expect_kw("cap")?;
                let cap = self.int()?;
                self.expect_punct(":")?;
                let src = self.endpoint()?;
                self.expect_punct("->")?;
                let dst = self.endpoint()?;
                self.expect_punct(";")?;
                let capacity = u32::try_from(cap).unwrap_or(u32::MAX);
                ast.channels.push(ChannelDecl { name, capacity, src, dst, span: self.close(start) });
            } else if self.is_kw("external") {
                self.advance();
                let direction = self.direction()?;
                let name = self.ident()?;
                self.expect_punct("=")?;
                let target = self.endpoint()?;
                self.expect_punct(";")?;
                ast.externals.push(ExternalDecl { direction, name, target, span: self.close(start) });
            } else {
                return self.error("'inst', 'channel', 'external' or '}'");
            }
        }
        self.expect_punct("}")?;
        if *self.peek() != Tok::Eof {
            return self.error("end of input after design block");
        }
        Ok(ast)
    }

    fn direction(&mut self) -> PResult<Direction> {
        if self.is_kw("in") {
            self.advance();
            Ok(Direction::In)
        } else if self.is_kw("out") {
            self.advance();
            Ok(Direction::Out)
        } else {
            self.error("'in' or 'out'")
        }
    }

    fn endpoint(&mut self) -> PResult<Endpoint> {
        let instance = self.ident()?;
        self.expect_punct(".")?;
        let port = self.ident()?;
        Ok(Endpoint { instance, port })
    }

    fn process(&mut self) -> PResult<ProcessDecl> {
        let start = self.expect_kw("process")?;
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut ports = Vec::new();
        let mut vars = Vec::new();
        while self.is_kw("in") || self.is_kw("out") {
            let pstart = self.span();
            let direction = self.direction()?;
            let pname = self.ident()?;
            self.expect_punct(":")?;
            let width = self.width()?;
            self.expect_punct(";")?;
            ports.push(PortDecl { name: pname, direction, width, span: self.close(pstart) });
        }
        while self.is_kw("var") {
            let vstart = self.advance().span;
            let vname = self.ident()?;
            self.expect_punct(":")?;
            let width = self.width()?;
            let init = if self.eat_punct("=") { Some(self.int()?) } else { None };
            self.expect_punct(";")?;
            vars.push(VarDecl { name: vname, width, init, span: self.close(vstart) });
        }
        self.expect_kw("body")?;
        let body = self.block()?;
        self.expect_punct("}")?;
        Ok(ProcessDecl { name, ports, vars, body, span: self.close(start) })
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            stmts.push(self.stmt()?);
        }
        self.expect_punct("}")?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.span();
        if self.is_kw("if") {
            self.advance();
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then_body = self.block()?;
            let else_body = if self.is_kw("else") {
                self.advance();
                self.block()?
            } else {
                Vec::new()
            };
            return Ok(Stmt::If { cond, then_body, else_body, span: self.close(start) });
        }
        if self.is_kw("push") {
            self.advance();
            self.expect_punct("(")?;
            let port = self.ident()?;
            self.expect_punct(",")?;
            let value = self.expr()?;
            self.expect_punct(")")?;
            self.expect_punct(";")?;
            return Ok(Stmt::Push { port, value, span: self.close(start) });
        }
        if self.is_punct("(") {
            self.advance();
            let var = self.ident()?;
            self.expect_punct(",")?;
            let status = self.ident()?;
            self.expect_punct(")")?;
            self.expect_punct("=")?;
            self.expect_kw("popnb")?;
            self.expect_punct("(")?;
            let port = self.ident()?;
            self.expect_punct(")")?;
            self.expect_punct(";")?;
            return Ok(Stmt::PopNb { var, status, port, span: self.close(start) });
        }
        let target = self.ident()?;
        self.expect_punct("=")?;
        let stmt = if self.is_kw("pop") && matches!(self.peek_at(1), Tok::Punct("(")) {
            self.advance();
            self.expect_punct("(")?;
            let port = self.ident()?;
            self.expect_punct(")")?;
            Stmt::Pop { var: target, port, span: start }
        } else if self.is_kw("pushnb") {
            self.advance();
            self.expect_punct("(")?;
            let port = self.ident()?;
            self.expect_punct(",")?;
            let value = self.expr()?;
            self.expect_punct(")")?;
            Stmt::PushNb { status: target, port, value, span: start }
        } else if self.is_kw("popnb") {
            return self.error("'(' var ',' status ')' on the left of popnb");
        } else {
            let value = self.expr()?;
            Stmt::Assign { var: target, value, span: start }
        };
        self.expect_punct(";")?;
        let span = self.close(start);
        Ok(match stmt {
            Stmt::Pop { var, port, .. } => Stmt::Pop { var, port, span },
            Stmt::PushNb { status, port, value, .. } => Stmt::PushNb { status, port, value, span },
            Stmt::Assign { var, value, .. } => Stmt::Assign { var, value, span },
            other => other,
        })
    }

    // Precedence, loosest first: | ^ & (== !=) < (+ -) ~
    fn expr(&mut self) -> PResult<Expr> {
        self.binary_level(0)
    }

    fn binary_level(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: &[&[(&str, BinOp)]] = &[
            &[("|", BinOp::Or)],
            &[("^", BinOp::Xor)],
            &[("&", BinOp::And)],
            &[("==", BinOp::Eq), ("!=", BinOp::Ne)],
            &[("<", BinOp::Lt)],
            &[("+", BinOp::Add), ("-", BinOp::Sub)],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let start = self.span();
        let mut lhs = self.binary_level(level + 1)?;
        loop {
            let op = LEVELS[level].iter().find(|(p, _)| self.is_punct(p)).map(|&(_, op)| op);
            let Some(op) = op else { break };
            self.advance();
            let rhs = self.binary_level(level + 1)?;
            lhs = Expr {
                kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                span: self.close(start),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.span();
        if self.eat_punct("~") {
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Not(Box::new(inner)), span: self.close(start) });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(value) => {
                self.advance();
                ExprKind::Const { value, width: None }
            }
            Tok::Sized { width, value } => {
                self.advance();
                ExprKind::Const { value, width: Some(width) }
            }
            Tok::Punct("(") => {
                self.advance();
                let e = self.expr()?;
                self.expect_punct(")")?;
                return Ok(Expr { kind: e.kind, span: self.close(start) });
            }
            Tok::Ident(ref s) if s == "mux" => {
                self.advance();
                self.expect_punct("(")?;
                let c = self.expr()?;
                self.expect_punct(",")?;
                let a = self.expr()?;
                self.expect_punct(",")?;
                let b = self.expr()?;
                self.expect_punct(")")?;
                ExprKind::Mux(Box::new(c), Box::new(a), Box::new(b))
            }
            Tok::Ident(_) => ExprKind::Var(self.ident()?.name),
            _ => return self.error("expression"),
        };
        Ok(Expr { kind, span: self.close(start) })
    }
}

/// Parses design text without semantic checks.
pub fn parse_unchecked(text: &str) -> Result<DesignAst, Vec<Diagnostic>> {
    let toks = tokenize(text).map_err(|d| vec![d])?;
    let mut p = Parser { toks, pos: 0 };
    p.design().map_err(|d| vec![d])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_diagnostic() {
        let err = parse_unchecked("").unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].code, DiagCode::Syntax);
        assert!(err[0].message.contains("expected 'process' or 'design'"), "{}", err[0].message);
    }

    #[test]
    fn precedence_and_sized_literals() {
        let ast = parse_unchecked(
            "process P { out o: 4; var x: 4; body { x = 1 + 2 & 4'hF == 3'b101 | ~x; } } design { }",
        )
        .unwrap();
        let Stmt::Assign { value, .. } = &ast.processes[0].body[0] else { panic!() };
        // top is `|`
        let ExprKind::Binary(BinOp::Or, lhs, _) = &value.kind else { panic!("{value:?}") };
        let ExprKind::Binary(BinOp::And, _, cmp) = &lhs.kind else { panic!() };
        let ExprKind::Binary(BinOp::Eq, l, r) = &cmp.kind else { panic!() };
        assert_eq!(l.kind, ExprKind::Const { value: 15, width: Some(4) });
        assert_eq!(r.kind, ExprKind::Const { value: 5, width: Some(3) });
    }

    #[test]
    fn crlf_and_comments() {
        let text = "// header\r\nprocess P {\r\n  in a: 1; // port\r\n  body { }\r\n}\r\ndesign { inst p: P; }\r\n";
        let ast = parse_unchecked(text).unwrap();
        assert_eq!(ast.processes.len(), 1);
        assert_eq!(ast.instances.len(), 1);
    }

    #[test]
    fn error_span_points_at_token() {
        let text = "process P {\n  in a 1;\n  body { }\n}\ndesign { }";
        let err = parse_unchecked(text).unwrap_err();
        assert_eq!((err[0].span.line, err[0].span.col), (2, 8));
    }

    #[test]
    fn statement_forms() {
        let text = "process P { in a: 2; out b: 2; var x: 2; var s: 1; body {
            x = pop(a); (x, s) = popnb(a); push(b, x); s = pushnb(b, x);
            if (s) { x = 0; } else { x = 1; }
        } } design { }";
        let ast = parse_unchecked(text).unwrap();
        let body = &ast.processes[0].body;
        assert!(matches!(body[0], Stmt::Pop { .. }));
        assert!(matches!(body[1], Stmt::PopNb { .. }));
        assert!(matches!(body[2], Stmt::Push { .. }));
        assert!(matches!(body[3], Stmt::PushNb { .. }));
        assert!(matches!(body[4], Stmt::If { .. }));
    }
}
