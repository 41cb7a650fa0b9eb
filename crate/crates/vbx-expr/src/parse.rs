//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := ('-'|'+') unary | factor
//! factor := atom ('^' exponent)?
//! exponent := ['+'|'-'] int | '(' ['+'|'-'] int ['/' int] ')'
//! atom   := number | symbol | fn '(' expr ')' | '(' expr ')'
//! ```
//!
//! The minus sign may be written `-` or `−`. Numbers are exact decimals.

use crate::coord::Coordinate;
use crate::expr::Expr;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

/// Largest accepted integer exponent magnitude.
const MAX_EXPONENT: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol '{name}' at byte {offset}")]
    UnknownSymbol { offset: usize, name: String },
    #[error("malformed derivative index '{name}' at byte {offset}: {message}")]
    BadIndex {
        offset: usize,
        name: String,
        message: String,
    },
    #[error("division by zero at byte {offset}")]
    DivisionByZero { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownSymbol { offset, .. }
            | ParseError::BadIndex { offset, .. }
            | ParseError::DivisionByZero { offset } => *offset,
        }
    }
}

/// Parse with three independent variables.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, 3)
}

/// Parse with `n` independent variables; symbols beyond `n` are rejected.
pub fn parse_with(text: &str, n: u8) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        n,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected character"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    n: u8,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Next significant character, with `−` folded into `-`.
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..]
            .chars()
            .next()
            .map(|c| if c == '\u{2212}' { '-' } else { c })
    }

    fn bump(&mut self) {
        if let Some(c) = self.src[self.pos..].chars().next() {
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Some('-') => {
                    self.bump();
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(Expr::sum(&terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some('/') => {
                    self.bump();
                    let at = self.pos;
                    let d = self.unary()?;
                    acc = acc
                        .checked_div(&d)
                        .ok_or(ParseError::DivisionByZero { offset: at })?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.bump();
                self.unary()
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.pos;
        let (p, q) = if self.eat('(') {
            let neg = self.sign();
            let p = self.integer()?;
            let q = if self.eat('/') { self.integer()? } else { 1 };
            self.expect(')')?;
            (if neg { -p } else { p }, q)
        } else {
            let neg = self.sign();
            let p = self.integer()?;
            (if neg { -p } else { p }, 1)
        };
        if q == 0 {
            return Err(ParseError::DivisionByZero { offset: at });
        }
        if p.abs() > MAX_EXPONENT || q > MAX_EXPONENT {
            return Err(ParseError::Syntax {
                offset: at,
                message: "exponent too large".into(),
            });
        }
        base.pow_q(p as i32, q as i32)
            .ok_or(ParseError::DivisionByZero { offset: at })
    }

    fn sign(&mut self) -> bool {
        match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected integer"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: "integer out of range".into(),
            })
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let int_len = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        let mut value = BigRational::zero();
        if int_len > 0 {
            value = BigRational::from_integer(rest[..int_len].parse::<BigInt>().unwrap());
        }
        self.pos += int_len;
        if self.src[self.pos..].starts_with('.') {
            self.pos += 1;
            let frac = &self.src[self.pos..];
            let flen = frac
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(frac.len());
            if flen == 0 && int_len == 0 {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: "malformed number".into(),
                });
            }
            if flen > 0 {
                let digits: BigInt = frac[..flen].parse().unwrap();
                let scale = num_traits::Pow::pow(BigInt::from(10), flen as u32);
                value += BigRational::new(digits, scale);
            }
            self.pos += flen;
        }
        Ok(Expr::constant(value))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => self.symbol(),
            Some(_) => Err(self.syntax("expected expression")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn symbol(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        let name = &rest[..len];
        self.pos += len;
        let func = match name {
            "exp" | "log" | "sqrt" | "sin" | "cos" => Some(name),
            _ => None,
        };
        if let Some(func) = func {
            if self.peek() == Some('(') {
                self.bump();
                let at = self.pos;
                let arg = self.expr()?;
                self.expect(')')?;
                return Ok(match func {
                    "exp" => arg.exp(),
                    "log" => {
                        if arg.is_zero() {
                            return Err(ParseError::Syntax {
                                offset: at,
                                message: "log of zero".into(),
                            });
                        }
                        arg.log()
                    }
                    "sqrt" => arg.sqrt(),
                    "sin" => arg.sin(),
                    _ => arg.cos(),
                });
            }
        }
        self.coordinate(name, start).map(Expr::coord)
    }

    fn coordinate(&self, name: &str, offset: usize) -> Result<Coordinate, ParseError> {
        let unknown = || ParseError::UnknownSymbol {
            offset,
            name: name.into(),
        };
        if let Some(d) = name.strip_prefix('x') {
            let i: u8 = d.parse().map_err(|_| unknown())?;
            if d.len() == 1 && (1..=self.n).contains(&i) {
                return Ok(Coordinate::X(i));
            }
            return Err(unknown());
        }
        let Some(digits) = name.strip_prefix('u') else {
            return Err(unknown());
        };
        if digits.is_empty() {
            return Ok(Coordinate::U);
        }
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(unknown());
        }
        let bad = |message: String| ParseError::BadIndex {
            offset,
            name: name.into(),
            message,
        };
        if digits.len() > 12 {
            return Err(bad("at most 12 index digits".into()));
        }
        let idx: Vec<u8> = digits.bytes().map(|b| b - b'0').collect();
        if let Some(d) = idx.iter().find(|&&d| d == 0 || d > self.n) {
            return Err(bad(format!("digit {d} outside 1..{}", self.n)));
        }
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if sorted != idx {
            let hint: String = sorted.iter().map(|d| d.to_string()).collect();
            return Err(bad(format!("indices must be sorted; did you mean u{hint}")));
        }
        Ok(Coordinate::D(idx))
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
