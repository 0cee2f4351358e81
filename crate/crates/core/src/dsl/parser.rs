use super::ast::{Ast, AstKind};
use super::lexer::{Token, TokenKind};
use super::{DslError, Span, Stage};
use crate::hilbert::Cplx;

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn end_span(&self) -> Span {
        let end = self.toks.last().map_or(0, |t| t.span.end);
        Span::new(end, end + 1)
    }

    fn here(&self) -> Span {
        self.toks.get(self.pos).map_or_else(|| self.end_span(), |t| t.span)
    }

    fn err(&self, message: impl Into<String>) -> DslError {
        DslError::new(Stage::Parse, self.here(), message)
    }

    fn bin(kind: fn(Box<Ast>, Box<Ast>) -> AstKind, a: Ast, b: Ast) -> Ast {
        let span = a.span.join(b.span);
        Ast::new(kind(Box::new(a), Box::new(b)), span)
    }

    fn sum(&mut self) -> Result<Ast, DslError> {
        let mut lhs = self.scaled()?;
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.pos += 1;
                    let rhs = self.scaled()?;
                    lhs = Self::bin(AstKind::Add, lhs, rhs);
                }
                Some(TokenKind::Minus) => {
                    let minus = self.here();
                    self.pos += 1;
                    let rhs = self.scaled()?;
                    let neg = Self::negate(rhs, minus);
                    lhs = Self::bin(AstKind::Add, lhs, neg);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn negate(operand: Ast, minus: Span) -> Ast {
        let span = minus.join(operand.span);
        if let AstKind::Scalar(c) = operand.kind {
            if !(c.re.is_sign_negative() || c.im.is_sign_negative()) {
                return Ast::new(AstKind::Scalar(-c), span);
            }
        }
        let minus_one = Ast::new(AstKind::Scalar(Cplx::new(-1.0, 0.0)), minus);
        Ast::new(AstKind::Scale(Box::new(minus_one), Box::new(operand)), span)
    }

    fn scaled(&mut self) -> Result<Ast, DslError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&TokenKind::Star) {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Self::bin(AstKind::Scale, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, DslError> {
        if self.peek() == Some(&TokenKind::Minus) {
            let minus = self.here();
            self.pos += 1;
            let operand = self.unary()?;
            return Ok(Self::negate(operand, minus));
        }
        self.tensor()
    }

    fn tensor(&mut self) -> Result<Ast, DslError> {
        let mut lhs = self.apply()?;
        while self.peek() == Some(&TokenKind::Tensor) {
            self.pos += 1;
            let rhs = self.apply()?;
            lhs = Self::bin(AstKind::Tensor, lhs, rhs);
        }
        Ok(lhs)
    }

    fn starts_primary(&self) -> bool {
        matches!(
            self.peek(),
            Some(TokenKind::Ket(_) | TokenKind::Bra(_) | TokenKind::Ident(_) | TokenKind::Number(_) | TokenKind::LParen)
        )
    }

    fn apply(&mut self) -> Result<Ast, DslError> {
        let mut lhs = self.postfix()?;
        while self.starts_primary() {
            let rhs = self.postfix()?;
            lhs = Self::bin(AstKind::Apply, lhs, rhs);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Ast, DslError> {
        let mut node = self.primary()?;
        while self.peek() == Some(&TokenKind::Dagger) {
            let span = node.span.join(self.here());
            self.pos += 1;
            node = Ast::new(AstKind::Dagger(Box::new(node)), span);
        }
        Ok(node)
    }

    fn primary(&mut self) -> Result<Ast, DslError> {
        let span = self.here();
        let kind = match self.peek() {
            Some(TokenKind::Ket(n)) => AstKind::KetLeaf(n.clone()),
            Some(TokenKind::Bra(n)) => AstKind::BraLeaf(n.clone()),
            Some(TokenKind::Ident(n)) => AstKind::OpLeaf(n.clone()),
            Some(TokenKind::Number(c)) => AstKind::Scalar(*c),
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(&TokenKind::RParen) {
                    return Err(DslError::new(Stage::Parse, span.join(self.here()), "unbalanced `(`"));
                }
                let close = self.here();
                self.pos += 1;
                return Ok(Ast::new(inner.kind, span.join(close)));
            }
            Some(TokenKind::RParen) => return Err(self.err("unexpected `)`")),
            Some(other) => return Err(self.err(format!("expected an operand, found {}", describe(other)))),
            None => return Err(self.err("unexpected end of input")),
        };
        self.pos += 1;
        Ok(Ast::new(kind, span))
    }
}

fn describe(kind: &TokenKind) -> &'static str {
    match kind {
        TokenKind::Plus => "`+`",
        TokenKind::Minus => "`-`",
        TokenKind::Star => "`*`",
        TokenKind::Tensor => "`(x)`",
        TokenKind::Dagger => "a dagger",
        TokenKind::RParen => "`)`",
        _ => "a token",
    }
}

/// Parses a token stream into a syntax tree.
pub fn parse(tokens: &[Token]) -> Result<Ast, DslError> {
    let mut p = Parser { toks: tokens, pos: 0 };
    let ast = p.sum()?;
    if p.pos < tokens.len() {
        let message = match &tokens[p.pos].kind {
            TokenKind::RParen => "unbalanced `)`".to_string(),
            other => format!("unexpected {}", describe(other)),
        };
        return Err(p.err(message));
    }
    Ok(ast)
}
