//! A small Dirac-notation expression language.
//!
//! ```text
//! |a>            ket of the bound vector `a`
//! <a|            bra of `a`
//! <a|b>          sugar for `<a| |b>`
//! x (x) y, x ⊗ y tensor product
//! f x            application (juxtaposition)
//! x', x†         dagger
//! 2 * x, 0.5i    scalars; `(1 + 2i)` needs parentheses
//! ```
//!
//! Precedence, tightest first: dagger, application, tensor, `*`, `+`/`-`.
//! Builtin operators are `P_sym`, `P_asym`, `A_hat` and `U[2,1,3]`
//! (a permutation given by the one-based images of `1..N`).

mod ast;
mod eval;
mod lexer;
mod parser;

use std::fmt;

pub use ast::{Ast, AstKind};
pub use eval::{evaluate, format_cplx, Binding, Bindings, Operator, Value};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

/// Half-open byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span { start: self.start.min(other.start), end: self.end.max(other.end) }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Lex,
    Parse,
    Eval,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{} error at {span}: {message}", match .stage { Stage::Lex => "lex", Stage::Parse => "parse", Stage::Eval => "evaluation" })]
pub struct DslError {
    pub stage: Stage,
    pub span: Span,
    pub message: String,
}

impl DslError {
    pub(crate) fn new(stage: Stage, span: Span, message: impl Into<String>) -> Self {
        Self { stage, span, message: message.into() }
    }

    /// Renders the error with a caret line under the offending span.
    pub fn render(&self, source: &str) -> String {
        let start = source[..self.span.start.min(source.len())].chars().count();
        let width = source
            .get(self.span.start..self.span.end.min(source.len()))
            .map_or(1, |s| s.chars().count().max(1));
        format!("{self}\n  {source}\n  {}{}", " ".repeat(start), "^".repeat(width))
    }
}

/// Tokenize and parse in one step.
pub fn parse_str(source: &str) -> Result<Ast, DslError> {
    parse(&tokenize(source)?)
}
