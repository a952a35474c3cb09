// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::Serialize;

use super::ast::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagCode {
    Syntax,
    UnknownIdentifier,
    DuplicateDeclaration,
    WidthMismatch,
    WidthOutOfRange,
    CapacityOutOfRange,
    ConstantOverflow,
    Direction,
    DuplicateConnection,
    UnconnectedPort,
    UseBeforeAssign,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::Syntax => "syntax",
            DiagCode::UnknownIdentifier => "unknown-identifier",
            DiagCode::DuplicateDeclaration => "duplicate-declaration",
            DiagCode::WidthMismatch => "width-mismatch",
            DiagCode::WidthOutOfRange => "width-out-of-range",
            DiagCode::CapacityOutOfRange => "capacity-out-of-range",
            DiagCode::ConstantOverflow => "constant-overflow",
            DiagCode::Direction => "direction",
            DiagCode::DuplicateConnection => "duplicate-connection",
            DiagCode::UnconnectedPort => "unconnected-port",
            DiagCode::UseBeforeAssign => "use-before-assign",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn new(code: DiagCode, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { code, message: message.into(), span }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error[{}]: {}", self.span, self.code.as_str(), self.message)
    }
}

impl std::error::Error for Diagnostic {}
