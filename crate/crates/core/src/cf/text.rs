//! Text form of continued fractions.
//!
//! ```text
//! cf       := [ "q=" index ] "[" body "]"
//! index    := digits | "inf"
//! body     := ints                      finite
//!           | [ ints ] ";" "(" ints ")" preperiod and period
//!           | "(" ints ")"              purely periodic
//! ints     := int { "," int }
//! ```
//!
//! Whitespace is allowed between tokens. Error positions are character
//! offsets into the input.

use std::sync::Arc;

use super::infinite::InfiniteRosenCF;
use super::RosenCF;
use crate::algebraic::{make_context, HeckeIndex, QContext};
use crate::error::{Error, Result};

/// A parsed continued fraction.
#[derive(Clone, Debug)]
pub enum ParsedCF {
    Finite(RosenCF),
    Infinite(InfiniteRosenCF),
}

impl ParsedCF {
    pub fn context(&self) -> &Arc<QContext> {
        match self {
            ParsedCF::Finite(cf) => cf.context(),
            ParsedCF::Infinite(cf) => cf.context(),
        }
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    /// Where the value of q started, for error reporting.
    q_pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            q_pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(c) => Error::parse(self.pos, format!("expected {wanted}, found '{c}'")),
            None => Error::parse(self.pos, format!("expected {wanted}, found end of input")),
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.chars.len()
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('-' | '+' | '\u{2212}')) {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.unexpected("an integer"));
        }
        let text: String = self.chars[start..self.pos]
            .iter()
            .map(|&c| if c == '\u{2212}' { '-' } else { c })
            .collect();
        text.parse()
            .map_err(|_| Error::parse(start, format!("integer {text} does not fit in 64 bits")))
    }

    fn ints(&mut self, close: char) -> Result<Vec<i64>> {
        let mut out = vec![self.int()?];
        while !self.eat(close) {
            if !self.eat(',') {
                return Err(self.unexpected(&format!("',' or '{close}'")));
            }
            out.push(self.int()?);
        }
        Ok(out)
    }

    fn q_prefix(&mut self) -> Result<Option<HeckeIndex>> {
        self.skip_ws();
        if self.peek() != Some('q') {
            return Ok(None);
        }
        self.pos += 1;
        self.expect('=')?;
        self.skip_ws();
        let start = self.pos;
        self.q_pos = start;
        let w = self.word();
        if w.is_empty() {
            return Err(self.unexpected("a value of q"));
        }
        w.parse::<HeckeIndex>()
            .map(Some)
            .map_err(|e| Error::parse(start, format!("bad q '{w}': {e}")))
    }
}

/// Reads an optional `q=…` prefix, returning it with the character offset
/// of the remaining input.
pub fn parse_q_prefix(src: &str) -> Result<(Option<HeckeIndex>, usize)> {
    let mut cur = Cursor::new(src);
    let q = cur.q_prefix()?;
    cur.skip_ws();
    Ok((q, cur.pos))
}

/// Parses a continued fraction, using `default_q` when the text has no
/// `q=` prefix.
pub fn parse_cf(src: &str, default_q: Option<HeckeIndex>) -> Result<ParsedCF> {
    let mut cur = Cursor::new(src);
    let q = match (cur.q_prefix()?, default_q) {
        (Some(q), _) | (None, Some(q)) => q,
        (None, None) => return Err(Error::parse(0, "missing q (write q=<n> or q=inf)")),
    };
    let ctx = make_context(q).map_err(|e| Error::parse(cur.q_pos, e.to_string()))?;
    cur.expect('[')?;
    let parsed = if cur.eat('(') {
        let period = cur.ints(')')?;
        cur.expect(']')?;
        ParsedCF::Infinite(InfiniteRosenCF::periodic(&ctx, Vec::new(), period)?)
    } else if cur.eat(';') {
        cur.expect('(')?;
        let period = cur.ints(')')?;
        cur.expect(']')?;
        ParsedCF::Infinite(InfiniteRosenCF::periodic(&ctx, Vec::new(), period)?)
    } else {
        let mut head = vec![cur.int()?];
        loop {
            if cur.eat(']') {
                break ParsedCF::Finite(RosenCF::new(&ctx, head)?);
            }
            if cur.eat(';') {
                cur.expect('(')?;
                let period = cur.ints(')')?;
                cur.expect(']')?;
                break ParsedCF::Infinite(InfiniteRosenCF::periodic(&ctx, head, period)?);
            }
            if !cur.eat(',') {
                return Err(cur.unexpected("',', ';' or ']'"));
            }
            head.push(cur.int()?);
        }
    };
    if !cur.at_end() {
        return Err(cur.unexpected("end of input"));
    }
    Ok(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite(s: &str) -> RosenCF {
        match parse_cf(s, None).unwrap() {
            ParsedCF::Finite(cf) => cf,
            other => panic!("{other:?}"),
        }
    }

    fn infinite(s: &str) -> InfiniteRosenCF {
        match parse_cf(s, None).unwrap() {
            ParsedCF::Infinite(cf) => cf,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn finite_forms() {
        let cf = finite("q=5 [1,2,-1]");
        assert_eq!(cf.coeffs(), &[1, 2, -1]);
        assert_eq!(cf.to_string(), "q=5 [1,2,-1]");
        assert_eq!(
            finite(" q = inf [ 2 , 0 , 2 ] ").to_string(),
            "q=inf [2,0,2]"
        );
        let d = parse_cf("[0,3]", Some(HeckeIndex::Finite(5))).unwrap();
        assert_eq!(d.context().q(), HeckeIndex::Finite(5));
    }

    #[test]
    fn periodic_forms() {
        assert_eq!(infinite("q=4 [2;(2)]").to_string(), "q=4 [2;(2)]");
        assert_eq!(infinite("q=inf [;(1)]").to_string(), "q=inf [;(1)]");
        assert_eq!(infinite("q=inf [(1)]").to_string(), "q=inf [;(1)]");
        assert_eq!(
            infinite("q=6 [1,-2;(3,1)]").stream().prefix(6),
            vec![1, -2, 3, 1, 3, 1]
        );
    }

    #[test]
    fn errors_carry_positions() {
        let pos = |s: &str| match parse_cf(s, None) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos("[1]"), 0);
        assert_eq!(pos("q=5 [1,,2]"), 7);
        assert_eq!(pos("q=5 [1,2"), 8);
        assert_eq!(pos("q=5 [1] x"), 8);
        assert_eq!(pos("q=2 [1]"), 2);
        assert_eq!(pos("q=x [1]"), 2);
        assert_eq!(pos("q=5 [1;()]"), 8);
        assert!(matches!(
            parse_cf("q=5 []", None),
            Err(Error::Parse { position: 5, .. })
        ));
    }

    #[test]
    fn q_prefix_alone() {
        assert_eq!(
            parse_q_prefix("q=3").unwrap(),
            (Some(HeckeIndex::Finite(3)), 3)
        );
        assert_eq!(
            parse_q_prefix("q=inf [1]").unwrap(),
            (Some(HeckeIndex::Infinity), 6)
        );
        assert_eq!(parse_q_prefix("5/7").unwrap(), (None, 0));
    }
}
