//! Text notation: `w^2*3+w+5`, `w^(w+1)`, `w^w^2`.
//!
//! ```text
//! expr     := term ("+" term)*
//! term     := "w" ("^" exponent)? ("*" nat)? | nat
//! exponent := nat | "(" expr ")" | "w" ("^" exponent)?
//! ```
//!
//! Sums that are not in normal form are folded with ordinal addition.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::Ordinal;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ordinal syntax error at byte {position}: {message}")]
pub struct ParseOrdinalError {
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseOrdinalError> {
        Err(ParseOrdinalError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<BigUint, ParseOrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse"))
    }

    fn expr(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let next = self.term()?;
            acc = acc.add(&next);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') {
                    self.exponent()?
                } else {
                    Ordinal::one()
                };
                let coefficient = if self.eat(b'*') {
                    self.nat()?
                } else {
                    BigUint::one()
                };
                Ok(Ordinal::term(exponent, coefficient))
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::from(self.nat()?)),
            Some(_) => self.err("expected `w` or a natural number"),
            None => self.err("unexpected end of input"),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(b'w') => {
                self.pos += 1;
                let inner = if self.eat(b'^') {
                    self.exponent()?
                } else {
                    Ordinal::one()
                };
                Ok(Ordinal::omega_pow(inner))
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::from(self.nat()?)),
            Some(_) => self.err("expected exponent"),
            None => self.err("unexpected end of input"),
        }
    }
}

impl FromStr for Ordinal {
    type Err = ParseOrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let value = p.expr()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(value)
    }
}

fn write_exponent(e: &Ordinal, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.is_finite() || e.is_omega_power() {
        write_ordinal(e, f)
    } else {
        write!(f, "(")?;
        write_ordinal(e, f)?;
        write!(f, ")")
    }
}

pub(super) fn write_ordinal(o: &Ordinal, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if o.is_zero() {
        return write!(f, "0");
    }
    for (i, t) in o.terms().iter().enumerate() {
        if i > 0 {
            write!(f, "+")?;
        }
        if t.exponent.is_zero() {
            write!(f, "{}", t.coefficient)?;
            continue;
        }
        write!(f, "w")?;
        if t.exponent != Ordinal::one() {
            write!(f, "^")?;
            write_exponent(&t.exponent, f)?;
        }
        if !t.coefficient.is_one() {
            debug_assert!(!t.coefficient.is_zero());
            write!(f, "*{}", t.coefficient)?;
        }
    }
    Ok(())
}
