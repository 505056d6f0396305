//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := ['-'] integer | '(' ['-'] integer ')'
//! atom     := number | 'x' digits | func '(' expr ')' | '(' expr ')'
//! func     := 'exp' | 'ln' | 'sin' | 'cos' | 'sqrt'
//! number   := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```
//!
//! `-x1^2` parses as `-(x1^2)`; `^` does not chain.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{add, div, func, konst, mul, neg, pow, sub, Expression, Func, Node};
use crate::scalar::parse_rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    UnknownIdentifier(String),
    VariableOutOfRange { index: usize, dimension: usize },
    BadNumber(String),
    BadExponent,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::Expected(what) => write!(f, "expected {what}"),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier `{id}`"),
            ParseErrorKind::VariableOutOfRange { index, dimension } => {
                write!(
                    f,
                    "variable x{index} out of range (expected x1..x{dimension})"
                )
            }
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number `{s}`"),
            ParseErrorKind::BadExponent => write!(f, "exponent must be an integer literal"),
        }
    }
}

/// Syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    dimension: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            position: self.pos,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, what: &'static str) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&mut self, what: &'static str) -> ParseError {
        match self.peek() {
            None => self.error(ParseErrorKind::UnexpectedEnd),
            Some(_) => self.error(ParseErrorKind::Expected(what)),
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn expr(&mut self) -> PResult<Arc<Node>> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = add(lhs, self.term()?);
            } else if self.eat('-') {
                lhs = sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<Arc<Node>> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = mul(lhs, self.unary()?);
            } else if self.eat('/') {
                lhs = div(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Arc<Node>> {
        if self.eat('-') {
            Ok(neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> PResult<Arc<Node>> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let negative = self.eat('-');
        self.skip_ws();
        let start = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            self.pos = start;
            return Err(self.error(ParseErrorKind::BadExponent));
        }
        let magnitude: i32 = digits.parse().map_err(|_| ParseError {
            kind: ParseErrorKind::BadExponent,
            position: start,
        })?;
        if paren {
            self.expect(')', "`)`")?;
        }
        Ok(pow(base, if negative { -magnitude } else { magnitude }))
    }

    fn atom(&mut self) -> PResult<Arc<Node>> {
        let Some(c) = self.peek() else {
            return Err(self.error(ParseErrorKind::UnexpectedEnd));
        };
        if c == '(' {
            self.pos += 1;
            let inner = self.expr()?;
            self.expect(')', "`)`")?;
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            let ident = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
            if let Some(f) = Func::from_name(ident) {
                self.expect('(', "`(` after function name")?;
                let arg = self.expr()?;
                self.expect(')', "`)`")?;
                return Ok(func(f, arg));
            }
            if let Some(digits) = ident.strip_prefix('x') {
                if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                    let index: usize = digits.parse().unwrap_or(usize::MAX);
                    if index == 0 || index > self.dimension {
                        return Err(ParseError {
                            kind: ParseErrorKind::VariableOutOfRange {
                                index,
                                dimension: self.dimension,
                            },
                            position: start,
                        });
                    }
                    return Ok(Arc::new(Node::Var(index - 1)));
                }
            }
            return Err(ParseError {
                kind: ParseErrorKind::UnknownIdentifier(ident.to_string()),
                position: start,
            });
        }
        Err(self.error(ParseErrorKind::UnexpectedChar(c)))
    }

    fn number(&mut self) -> PResult<Arc<Node>> {
        let start = self.pos;
        self.take_while(|c| c.is_ascii_digit());
        if self.src[self.pos..].starts_with('.') {
            self.pos += 1;
            self.take_while(|c| c.is_ascii_digit());
        }
        let rest = &self.src[self.pos..];
        if rest.starts_with(['e', 'E']) {
            let after = rest[1..].trim_start_matches(['+', '-']);
            let sign_len = rest.len() - 1 - after.len();
            if sign_len <= 1 && after.starts_with(|c: char| c.is_ascii_digit()) {
                self.pos += 1 + sign_len;
                self.take_while(|c| c.is_ascii_digit());
            }
        }
        let text = &self.src[start..self.pos];
        parse_rational(text).map(konst).ok_or(ParseError {
            kind: ParseErrorKind::BadNumber(text.to_string()),
            position: start,
        })
    }
}

pub(super) fn parse(text: &str, dimension: usize) -> Result<Expression, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        dimension,
    };
    let root = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(p.error(ParseErrorKind::UnexpectedChar(c)));
    }
    Ok(Expression {
        nvars: dimension,
        root,
    })
}
