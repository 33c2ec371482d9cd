//! Text parsing for polynomials.
//!
//! Accepts integers, variables `x<k>` (or single letters `a`..`w`, mapped to
//! ids 1..23), `+`, `-`, `*`, `^` with a non-negative integer exponent, and
//! parentheses.

use thiserror::Error;

use super::{SparsePoly, Var};
use crate::int::Int;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParsePolyError {
    #[error("unexpected character '{0}' at offset {1}")]
    Unexpected(char, usize),
    #[error("unexpected end of input")]
    Eof,
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("bad exponent at offset {0}")]
    BadExponent(usize),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn parse_poly(s: &str) -> Result<SparsePoly, ParsePolyError> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(ParsePolyError::Unexpected(p.src[p.pos] as char, p.pos));
    }
    Ok(e)
}

/// Maps a variable name to its id.
pub fn variable_id(name: &str) -> Option<Var> {
    if let Some(rest) = name.strip_prefix('x') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return rest.parse().ok();
        }
    }
    let b = name.as_bytes();
    if b.len() == 1 && (b'a'..=b'w').contains(&b[0]) {
        return Some((b[0] - b'a' + 1) as Var);
    }
    None
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<SparsePoly, ParsePolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly, ParsePolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SparsePoly, ParsePolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| ParsePolyError::BadExponent(start))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SparsePoly, ParsePolyError> {
        let c = self.peek().ok_or(ParsePolyError::Eof)?;
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if self.peek() != Some(b')') {
                return match self.peek() {
                    Some(c) => Err(ParsePolyError::Unexpected(c as char, self.pos)),
                    None => Err(ParsePolyError::Eof),
                };
            }
            self.pos += 1;
            return Ok(e);
        }
        if c == b'-' {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let start = self.pos;
        if c.is_ascii_digit() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let v: Int = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .expect("digits parse as an integer");
            return Ok(SparsePoly::constant(v));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return variable_id(name)
                .map(SparsePoly::var)
                .ok_or_else(|| ParsePolyError::UnknownVariable(name.to_string()));
        }
        Err(ParsePolyError::Unexpected(c as char, self.pos))
    }
}
