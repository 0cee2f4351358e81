use super::{DslError, Span, Stage};
use crate::hilbert::Cplx;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ket(String),
    Bra(String),
    Ident(String),
    Number(Cplx),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Tensor,
    Dagger,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(offset)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn err(&self, start: usize, message: impl Into<String>) -> DslError {
        DslError::new(Stage::Lex, Span::new(start, self.pos.max(start + 1)), message)
    }

    fn number(&mut self) -> Result<Cplx, DslError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some('.') {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        let value: f64 = text.parse().map_err(|_| self.err(start, format!("malformed number `{text}`")))?;
        if !value.is_finite() {
            return Err(self.err(start, format!("number `{text}` is out of range")));
        }
        let imaginary = self.peek() == Some('i') && !self.peek_at(1).is_some_and(is_ident_char);
        if imaginary {
            self.pos += 1;
            Ok(Cplx::new(0.0, value))
        } else if self.peek().is_some_and(is_ident_char) {
            self.ident();
            Err(self.err(start, "identifier cannot start with a digit"))
        } else {
            Ok(Cplx::new(value, 0.0))
        }
    }

    /// `U[2, 1, 3]` style suffix, normalized to `U[2,1,3]`.
    fn bracket_suffix(&mut self, start: usize, name: &str) -> Result<String, DslError> {
        self.pos += 1;
        let mut parts = Vec::new();
        let mut current = String::new();
        loop {
            match self.bump() {
                Some(c) if c.is_ascii_digit() => current.push(c),
                Some(',' | ' ' | '\t') => {
                    if !current.is_empty() {
                        parts.push(std::mem::take(&mut current));
                    }
                }
                Some(']') => {
                    if !current.is_empty() {
                        parts.push(current);
                    }
                    break;
                }
                Some(c) => return Err(self.err(start, format!("unexpected `{c}` in index list"))),
                None => return Err(self.err(start, "unterminated `[`")),
            }
        }
        if parts.is_empty() {
            return Err(self.err(start, "empty index list"));
        }
        Ok(format!("{name}[{}]", parts.join(",")))
    }

    fn run(mut self) -> Result<Vec<Token>, DslError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let kind = match c {
                '|' => {
                    self.bump();
                    let name = self.ident();
                    if name.is_empty() || self.peek() != Some('>') {
                        return Err(self.err(start, "unterminated ket, expected `|name>`"));
                    }
                    self.bump();
                    TokenKind::Ket(name.to_string())
                }
                '<' => {
                    self.bump();
                    let name = self.ident();
                    if name.is_empty() || self.peek() != Some('|') {
                        return Err(self.err(start, "unterminated bra, expected `<name|`"));
                    }
                    self.bump();
                    out.push(Token { kind: TokenKind::Bra(name.to_string()), span: Span::new(start, self.pos) });
                    // `<a|b>` contraction sugar.
                    let ket_start = self.pos;
                    let ket = self.ident();
                    if !ket.is_empty() && self.peek() == Some('>') {
                        self.bump();
                        out.push(Token { kind: TokenKind::Ket(ket.to_string()), span: Span::new(ket_start, self.pos) });
                    } else {
                        self.pos = ket_start;
                    }
                    continue;
                }
                '(' if self.peek_at(1) == Some('x') && self.peek_at(2) == Some(')') => {
                    self.pos += 3;
                    TokenKind::Tensor
                }
                '⊗' => {
                    self.bump();
                    TokenKind::Tensor
                }
                '(' => {
                    self.bump();
                    TokenKind::LParen
                }
                ')' => {
                    self.bump();
                    TokenKind::RParen
                }
                '+' => {
                    self.bump();
                    TokenKind::Plus
                }
                '-' => {
                    self.bump();
                    TokenKind::Minus
                }
                '*' => {
                    self.bump();
                    TokenKind::Star
                }
                '\'' | '†' => {
                    self.bump();
                    TokenKind::Dagger
                }
                c if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) => {
                    TokenKind::Number(self.number()?)
                }
                c if is_ident_start(c) => {
                    let name = self.ident();
                    if self.peek() == Some('[') {
                        TokenKind::Ident(self.bracket_suffix(start, name)?)
                    } else {
                        TokenKind::Ident(name.to_string())
                    }
                }
                other => {
                    self.bump();
                    return Err(self.err(start, format!("illegal character `{other}`")));
                }
            };
            out.push(Token { kind, span: Span::new(start, self.pos) });
        }
        Ok(out)
    }
}

/// Splits source text into tokens; spans are byte offsets.
pub fn tokenize(text: &str) -> Result<Vec<Token>, DslError> {
    Lexer { src: text, pos: 0 }.run()
}
