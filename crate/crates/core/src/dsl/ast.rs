use std::fmt;

use super::Span;
use crate::hilbert::Cplx;

#[derive(Debug, Clone)]
pub enum AstKind {
    KetLeaf(String),
    BraLeaf(String),
    OpLeaf(String),
    Scalar(Cplx),
    Tensor(Box<Ast>, Box<Ast>),
    Apply(Box<Ast>, Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Scale(Box<Ast>, Box<Ast>),
    Dagger(Box<Ast>),
}

/// Syntax tree node. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct Ast {
    pub kind: AstKind,
    pub span: Span,
}

impl PartialEq for AstKind {
    fn eq(&self, other: &Self) -> bool {
        use AstKind::*;
        match (self, other) {
            (KetLeaf(a), KetLeaf(b)) | (BraLeaf(a), BraLeaf(b)) | (OpLeaf(a), OpLeaf(b)) => a == b,
            (Scalar(a), Scalar(b)) => a == b,
            (Tensor(a, b), Tensor(c, d))
            | (Apply(a, b), Apply(c, d))
            | (Add(a, b), Add(c, d))
            | (Scale(a, b), Scale(c, d)) => a == c && b == d,
            (Dagger(a), Dagger(b)) => a == b,
            _ => false,
        }
    }
}

impl PartialEq for Ast {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Ast {
    pub fn new(kind: AstKind, span: Span) -> Self {
        Self { kind, span }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        use AstKind::*;
        match &self.kind {
            KetLeaf(_) | BraLeaf(_) | OpLeaf(_) | Scalar(_) => 1,
            Tensor(a, b) | Apply(a, b) | Add(a, b) | Scale(a, b) => 1 + a.size() + b.size(),
            Dagger(a) => 1 + a.size(),
        }
    }

    fn is_atomic(&self) -> bool {
        match &self.kind {
            AstKind::KetLeaf(_) | AstKind::BraLeaf(_) | AstKind::OpLeaf(_) => true,
            AstKind::Scalar(c) => !is_negative_literal(*c),
            _ => false,
        }
    }
}

fn is_negative_literal(c: Cplx) -> bool {
    c.re.is_sign_negative() || c.im.is_sign_negative()
}

fn fmt_real(x: f64) -> String {
    format!("{x}")
}

/// Literal text for a scalar that the lexer reads back unchanged.
fn fmt_scalar(c: Cplx) -> String {
    if c.im == 0.0 {
        fmt_real(c.re)
    } else if c.re == 0.0 {
        if c.im < 0.0 {
            format!("-{}i", fmt_real(-c.im))
        } else {
            format!("{}i", fmt_real(c.im))
        }
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        format!("({} {sign} {}i)", fmt_real(c.re), fmt_real(c.im.abs()))
    }
}

struct Child<'a>(&'a Ast);

impl fmt::Display for Child<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_atomic() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

/// Fully parenthesized rendering; parsing it yields an equal tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AstKind::*;
        match &self.kind {
            KetLeaf(n) => write!(f, "|{n}>"),
            BraLeaf(n) => write!(f, "<{n}|"),
            OpLeaf(n) => write!(f, "{n}"),
            Scalar(c) => write!(f, "{}", fmt_scalar(*c)),
            Tensor(a, b) => write!(f, "{} (x) {}", Child(a), Child(b)),
            Apply(a, b) => write!(f, "{} {}", Child(a), Child(b)),
            Add(a, b) => write!(f, "{} + {}", Child(a), Child(b)),
            Scale(a, b) => write!(f, "{} * {}", Child(a), Child(b)),
            Dagger(a) => write!(f, "{}'", Child(a)),
        }
    }
}
