//! Parser for field literals: sums of terms `c`, `c*lambda^k`, `lambda`,
//! `-3/2 l^2` and so on. `l`, `lambda` and `λ` all name the generator.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FieldElement, QContext};
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.src[start..self.pos].parse().expect("digits"))
    }

    fn generator(&mut self) -> bool {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        for name in ["lambda", "λ", "l"] {
            if let Some(after) = rest.strip_prefix(name) {
                if !after.starts_with(|c: char| c.is_alphanumeric() || c == '_') {
                    self.pos += name.len();
                    return true;
                }
            }
        }
        false
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.pos, msg)
    }
}

pub(super) fn parse_field_literal(ctx: &Arc<QContext>, src: &str) -> Result<FieldElement> {
    let mut cur = Cursor { src, pos: 0 };
    let mut coeffs: Vec<BigRational> = Vec::new();
    let mut first = true;
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            if first {
                return Err(cur.error("empty literal"));
            }
            break;
        }
        let negative = cur.eat('-');
        if !negative && !cur.eat('+') && !first {
            return Err(cur.error("expected '+' or '-'"));
        }
        first = false;

        let mut coeff = BigRational::one();
        let mut power = 0usize;
        if let Some(n) = cur.digits() {
            coeff = BigRational::from_integer(n);
            if cur.eat('/') {
                let d = cur
                    .digits()
                    .ok_or_else(|| cur.error("expected denominator"))?;
                if d.is_zero() {
                    return Err(cur.error("zero denominator"));
                }
                coeff /= BigRational::from_integer(d);
            }
            let star = cur.eat('*');
            if cur.generator() {
                power = 1;
            } else if star {
                return Err(cur.error("expected 'lambda' after '*'"));
            }
        } else if cur.generator() {
            power = 1;
        } else {
            return Err(cur.error("expected a number or 'lambda'"));
        }
        if power == 1 && cur.eat('^') {
            let e = cur.digits().ok_or_else(|| cur.error("expected exponent"))?;
            power = usize::try_from(e).map_err(|_| cur.error("exponent too large"))?;
            if power > 4096 {
                return Err(cur.error("exponent too large"));
            }
        }
        if negative {
            coeff = -coeff;
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigRational::zero());
        }
        coeffs[power] += coeff;
    }
    Ok(FieldElement::from_coeffs(ctx, &coeffs))
}
