//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 't' | 's' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-t^2`
//! reads as `-(t^2)` and `2^3^2` as `2^(3^2)`.

use std::fmt;

use super::{BinOp, Expr, Func, Node, Var};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    InvalidNumber(String),
    UnknownIdentifier(String),
    NonConstantExponent,
    /// The exponent is constant but cannot be evaluated (e.g. `t^(1/0)`).
    InvalidExponent,
    /// A variable that is not allowed in this context (used by 1-D parsing).
    ForbiddenVariable(char),
}

/// Syntax error with the byte offset into the source text.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}")?,
            ParseErrorKind::UnexpectedToken(tok) => write!(f, "unexpected {tok:?}")?,
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input")?,
            ParseErrorKind::InvalidNumber(n) => write!(f, "invalid number {n:?}")?,
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier {id:?}")?,
            ParseErrorKind::NonConstantExponent => write!(f, "exponent must not depend on t or s")?,
            ParseErrorKind::InvalidExponent => write!(f, "exponent cannot be evaluated")?,
            ParseErrorKind::ForbiddenVariable(v) => write!(f, "variable {v:?} is not allowed")?,
        }
        write!(f, " at byte {}", self.offset)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => v.to_string(),
            Tok::Ident(id) => id.clone(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, start));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // Exponent part only when digits follow, so `2exp(t)` still lexes
            // `2` and then fails on the identifier.
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push((Tok::Num(v), start)),
                _ => {
                    return Err(ParseError {
                        kind: ParseErrorKind::InvalidNumber(text.to_string()),
                        offset: start,
                    })
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('\u{fffd}');
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedChar(ch),
            offset: start,
        });
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let tok = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            tok => ParseErrorKind::UnexpectedToken(tok.describe()),
        };
        ParseError {
            kind,
            offset: self.offset(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            let rhs = self.term()?;
            lhs = Expr::new(Node::Binary(op, lhs, rhs), pos);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            let rhs = self.unary()?;
            lhs = Expr::new(Node::Binary(op, lhs, rhs), pos);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            let (_, pos) = self.bump();
            let inner = self.unary()?;
            return Ok(match inner.as_const() {
                Some(c) => Expr::constant(-c, pos),
                None => Expr::new(Node::Neg(inner), pos),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let (_, pos) = self.bump();
        let exp_offset = self.offset();
        let exponent = self.unary()?;
        if !exponent.is_constant_expr() {
            return Err(ParseError {
                kind: ParseErrorKind::NonConstantExponent,
                offset: exp_offset,
            });
        }
        let k = match exponent.eval(0.0, 0.0) {
            Ok(k) if k.is_finite() => k,
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::InvalidExponent,
                    offset: exp_offset,
                })
            }
        };
        Ok(Expr::new(Node::Pow(base, k), pos))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::constant(v, offset))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(id) => {
                self.bump();
                match id.as_str() {
                    "t" => return Ok(Expr::var(Var::T, offset)),
                    "s" => return Ok(Expr::var(Var::S, offset)),
                    _ => {}
                }
                let Some(func) = Func::from_name(&id) else {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(id),
                        offset,
                    });
                };
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::new(Node::Call(func, arg), offset))
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses a function definition in the variables `t` and `s`.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        toks: lex(source)?,
        at: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected());
    }
    Ok(e)
}
