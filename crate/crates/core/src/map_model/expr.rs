//! Arithmetic expressions in one variable `x`, used to write map branches.
//!
//! ```text
//! expr   := term { ("+"|"-") term }
//! term   := factor { ("*"|"/") factor }
//! factor := unary [ "^" factor ]
//! unary  := [ "-" ] base
//! base   := NUMBER | "x" | "(" expr ")" | FUNC "(" expr ")"
//! FUNC   := "sqrt" | "exp" | "ln" | "abs"
//! ```
//!
//! A leading minus applies to the whole power, so `-x^2` is `-(x^2)`, and
//! `^` is right-associative: `2^3^2 = 2^9`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Abs,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapExpression {
    Const(f64),
    X,
    Unary(Func, Box<MapExpression>),
    Binary(BinOp, Box<MapExpression>, Box<MapExpression>),
}

impl MapExpression {
    pub fn constant(c: f64) -> Self {
        MapExpression::Const(c)
    }

    pub fn unary(f: Func, e: MapExpression) -> Self {
        MapExpression::Unary(f, Box::new(e))
    }

    pub fn binary(op: BinOp, l: MapExpression, r: MapExpression) -> Self {
        MapExpression::Binary(op, Box::new(l), Box::new(r))
    }

    /// Evaluates without any finiteness check.
    pub fn eval_raw(&self, x: f64) -> f64 {
        match self {
            MapExpression::Const(c) => *c,
            MapExpression::X => x,
            MapExpression::Unary(f, e) => {
                let v = e.eval_raw(x);
                match f {
                    Func::Sqrt => v.sqrt(),
                    Func::Exp => v.exp(),
                    Func::Ln => v.ln(),
                    Func::Abs => v.abs(),
                    Func::Neg => -v,
                }
            }
            MapExpression::Binary(op, l, r) => {
                let (l, r) = (l.eval_raw(x), r.eval_raw(x));
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                    BinOp::Pow => l.powf(r),
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = self.eval_raw(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { x })
        }
    }
}

impl fmt::Display for MapExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapExpression::Const(c) => write!(f, "{c}"),
            MapExpression::X => f.write_str("x"),
            MapExpression::Unary(Func::Neg, e) => write!(f, "-({e})"),
            MapExpression::Unary(func, e) => {
                let name = match func {
                    Func::Sqrt => "sqrt",
                    Func::Exp => "exp",
                    Func::Ln => "ln",
                    Func::Abs => "abs",
                    Func::Neg => unreachable!(),
                };
                write!(f, "{name}({e})")
            }
            MapExpression::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l} {sym} {r})")
            }
        }
    }
}

impl FromStr for MapExpression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expression(s)
    }
}

pub fn parse_expression(text: &str) -> Result<MapExpression> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some(tok) => Err(Error::Syntax { pos: tok.pos, message: format!("unexpected {}", tok.kind.describe()) }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Ident(name) => format!("identifier `{name}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let literal = &text[start..i];
                let value = literal
                    .parse::<f64>()
                    .map_err(|_| Error::Syntax { pos: start, message: format!("malformed number `{literal}`") })?;
                tokens.push(Token { kind: TokenKind::Number(value), pos: start });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token { kind: TokenKind::Ident(text[start..i].to_string()), pos: start });
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax { pos: start, message: format!("unexpected character `{ch}`") });
            }
        };
        tokens.push(Token { kind, pos: start });
        i += 1;
    }
    Ok(tokens)
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
        i += 1;
    }
    // optional exponent, only when followed by digits
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
    i
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        match self.peek() {
            Some(tok) if tok.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(Error::Syntax {
                pos: tok.pos,
                message: format!("expected {}, found {}", kind.describe(), tok.kind.describe()),
            }),
            None => Err(Error::Syntax {
                pos: self.end,
                message: format!("expected {}, found end of input", kind.describe()),
            }),
        }
    }

    fn expr(&mut self) -> Result<MapExpression> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = MapExpression::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<MapExpression> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = MapExpression::binary(op, lhs, self.factor()?);
        }
    }

    // unary minus wraps the power: -b^e parses as -(b^e)
    fn factor(&mut self) -> Result<MapExpression> {
        if let Some(TokenKind::Minus) = self.peek_kind() {
            self.pos += 1;
            return Ok(MapExpression::unary(Func::Neg, self.factor()?));
        }
        let base = self.base()?;
        if let Some(TokenKind::Caret) = self.peek_kind() {
            self.pos += 1;
            let exponent = self.factor()?;
            return Ok(MapExpression::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<MapExpression> {
        let pos = self.here();
        let Some(tok) = self.bump() else {
            return Err(Error::Syntax { pos, message: "unexpected end of input".into() });
        };
        match tok.kind {
            TokenKind::Number(v) => Ok(MapExpression::Const(v)),
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                let func = match name.as_str() {
                    "x" => return Ok(MapExpression::X),
                    "sqrt" => Func::Sqrt,
                    "exp" => Func::Exp,
                    "ln" => Func::Ln,
                    "abs" => Func::Abs,
                    _ => return Err(Error::UnknownIdentifier { name, pos: tok.pos }),
                };
                self.expect(TokenKind::LParen)?;
                let arg = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(MapExpression::unary(func, arg))
            }
            other => Err(Error::Syntax { pos: tok.pos, message: format!("unexpected {}", other.describe()) }),
        }
    }
}
