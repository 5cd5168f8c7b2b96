//! Polynomial expressions in one variable `x`.
//!
//! ```text
//! poly  := sign? term (sign term)*
//! term  := coeff ('*'? power)? | power
//! power := 'x' ('^' exp)?
//! ```
//!
//! Coefficients are integers of any size, exponents fit in `u32`.
//! Whitespace between tokens is ignored.

use intersective_core::IntPoly;
use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;

pub const GRAMMAR: &str = "\
polynomial grammar (integer coefficients, variable x):
  poly  := ['+'|'-'] term (('+'|'-') term)*
  term  := INT [['*'] x ['^' INT]] | x ['^' INT]
examples: \"x^2\", \"x^2 - 1\", \"3x^3+x\", \"x^3 + x^2 - 2*x\"";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: expected {}", self.position, self.expected)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
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

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, expected: expected.into() })
    }

    fn digits(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn power(&mut self) -> Result<usize, ParseError> {
        // caller has seen 'x'
        self.pos += 1;
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        match self.digits() {
            Some(d) => match d.parse::<u32>() {
                Ok(e) => Ok(e as usize),
                Err(_) => {
                    self.pos -= d.len();
                    self.err("exponent below 2^32")
                }
            },
            None => self.err("exponent"),
        }
    }

    fn term(&mut self) -> Result<(BigInt, usize), ParseError> {
        match self.peek() {
            Some(b'x') => Ok((BigInt::from(1), self.power()?)),
            Some(c) if c.is_ascii_digit() => {
                let c: BigInt = self.digits().expect("digit").parse().expect("digits");
                match self.peek() {
                    Some(b'*') => {
                        self.pos += 1;
                        if self.peek() != Some(b'x') {
                            return self.err("'x'");
                        }
                        Ok((c, self.power()?))
                    }
                    Some(b'x') => Ok((c, self.power()?)),
                    _ => Ok((c, 0)),
                }
            }
            _ => self.err("integer or 'x'"),
        }
    }
}

/// Parse `s` into its coefficient sequence.
pub fn parse_poly(s: &str) -> Result<IntPoly, ParseError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let mut coeffs: Vec<BigInt> = Vec::new();
    let mut first = true;
    loop {
        let sign = match p.peek() {
            Some(b'+') => {
                p.pos += 1;
                1
            }
            Some(b'-') => {
                p.pos += 1;
                -1
            }
            None if first => return p.err("a term"),
            None => break,
            Some(_) if first => 1,
            Some(_) => return p.err("'+' or '-'"),
        };
        first = false;
        let (c, e) = p.term()?;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, BigInt::zero());
        }
        coeffs[e] += c * sign;
    }
    Ok(IntPoly::new(coeffs))
}

/// Canonical text form, accepted by [`parse_poly`].
pub fn render_poly(h: &IntPoly) -> String {
    h.to_string()
}
