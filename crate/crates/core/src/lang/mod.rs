// SPDX-License-Identifier: Apache-2.0

//! The LI design language: processes with latency-insensitive ports, wired
//! together by channels inside a single `design` block.

pub mod ast;
pub mod check;
pub mod diag;
pub mod parser;
pub mod print;

pub use ast::*;
pub use check::validate;
pub use diag::{DiagCode, Diagnostic};
pub use parser::parse_unchecked;
pub use print::pretty_print;

/// Parses and validates. Either the AST is returned or at least one
/// diagnostic.
pub fn parse(text: &str) -> Result<DesignAst, Vec<Diagnostic>> {
    let ast = parse_unchecked(text)?;
    let diags = validate(&ast);
    if diags.is_empty() {
        Ok(ast)
    } else {
        Err(diags)
    }
}
