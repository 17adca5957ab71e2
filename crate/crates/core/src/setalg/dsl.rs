//! Text syntax for index sets.
//!
//! ```text
//! finite{1,2,3}  ap(a,d)  nat  interval(a,b)  factorials(BASE)  qge(p/q)
//! fintervals[(4!, 5! - 5!/4!); (7!, 8!)]  falt(SEQ)  fcover(SEQ)
//! union(A,B,...)  inter(A,B,...)  diff(A,B)  compl(A)
//! ```
//!
//! Whitespace between tokens is ignored. `Display` prints the same syntax, and
//! parsing the printed form gives back an equal tree.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use super::{FactBlock, FactExpr, FactorialFamily, IndexSet};
use crate::num::format_rational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Byte cursor over DSL text, shared with the stream syntax.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn error_at(&self, position: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            position,
            message: message.into(),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// Consumes a literal token such as `->` or `default`.
    pub fn eat_str(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |f| format!("`{f}`"));
            Err(self.error(format!("expected `{c}`, found {found}")))
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    pub fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 || !rest.as_bytes()[0].is_ascii_alphabetic() {
            return Err(self.error("expected a keyword"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    pub fn nat(&mut self) -> Result<BigUint, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.error("expected a natural number"));
        }
        self.pos += len;
        Ok(rest[..len].parse().expect("digits"))
    }

    /// `[-]p[/q]`
    pub fn rational(&mut self) -> Result<BigRational, ParseError> {
        let start = self.position();
        let negative = self.eat('-');
        let numer = self.nat()?;
        let denom = if self.eat('/') {
            self.nat()?
        } else {
            BigUint::from(1u32)
        };
        if denom.is_zero() {
            return Err(self.error_at(start, "zero denominator"));
        }
        let numer = if negative {
            -BigInt::from(numer)
        } else {
            BigInt::from(numer)
        };
        Ok(BigRational::new(numer, BigInt::from(denom)))
    }

    pub fn parse_set(&mut self) -> Result<IndexSet, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let keyword = self.ident()?;
        let semantic = |e: super::SetError| ParseError {
            position: start,
            message: e.to_string(),
        };
        match keyword {
            "nat" => Ok(IndexSet::naturals()),
            "finite" => {
                self.expect('{')?;
                let mut elems = Vec::new();
                if !self.eat('}') {
                    loop {
                        elems.push(self.nat()?);
                        if self.eat('}') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                IndexSet::finite(elems).map_err(semantic)
            }
            "ap" | "interval" => {
                self.expect('(')?;
                let a = self.nat()?;
                self.expect(',')?;
                let b = self.nat()?;
                self.expect(')')?;
                if keyword == "ap" {
                    IndexSet::arith_prog(a, b).map_err(semantic)
                } else {
                    IndexSet::interval(a, b).map_err(semantic)
                }
            }
            "factorials" => {
                if !self.eat('(') {
                    return Ok(IndexSet::factorial_points(IndexSet::naturals()));
                }
                if self.eat(')') {
                    return Ok(IndexSet::factorial_points(IndexSet::naturals()));
                }
                let base = self.parse_set()?;
                self.expect(')')?;
                Ok(IndexSet::factorial_points(base))
            }
            "fintervals" => {
                self.expect('[')?;
                let mut blocks = Vec::new();
                if !self.eat(']') {
                    loop {
                        let block_start = self.position();
                        self.expect('(')?;
                        let lo = self.fact_expr()?;
                        self.expect(',')?;
                        let hi = self.fact_expr()?;
                        self.expect(')')?;
                        blocks.push(FactBlock::new(lo, hi).map_err(|e| ParseError {
                            position: block_start,
                            message: e.to_string(),
                        })?);
                        if self.eat(']') {
                            break;
                        }
                        self.expect(';')?;
                    }
                }
                IndexSet::factorial_blocks(blocks).map_err(semantic)
            }
            "falt" | "fcover" | "compl" => {
                self.expect('(')?;
                let inner = self.parse_set()?;
                self.expect(')')?;
                Ok(match keyword {
                    "falt" => IndexSet::alternating_blocks(inner),
                    "fcover" => IndexSet::cover_blocks(inner),
                    _ => IndexSet::compl(inner),
                })
            }
            "qge" => {
                self.expect('(')?;
                let r = self.rational()?;
                self.expect(')')?;
                Ok(IndexSet::enum_threshold(r))
            }
            "union" | "inter" => {
                self.expect('(')?;
                let mut acc = self.parse_set()?;
                let mut operands = 1;
                while self.eat(',') {
                    let next = self.parse_set()?;
                    acc = if keyword == "union" {
                        IndexSet::union(acc, next)
                    } else {
                        IndexSet::inter(acc, next)
                    };
                    operands += 1;
                }
                if operands < 2 {
                    return Err(self.error(format!("`{keyword}` needs at least two operands")));
                }
                self.expect(')')?;
                Ok(acc)
            }
            "diff" => {
                self.expect('(')?;
                let a = self.parse_set()?;
                self.expect(',')?;
                let b = self.parse_set()?;
                self.expect(')')?;
                Ok(IndexSet::diff(a, b))
            }
            other => Err(ParseError {
                position: start,
                message: format!("unknown set `{other}`"),
            }),
        }
    }

    fn fact_expr(&mut self) -> Result<FactExpr, ParseError> {
        let mut acc = self.fact_term()?;
        loop {
            if self.eat('+') {
                acc = FactExpr::Add(Box::new(acc), Box::new(self.fact_term()?));
            } else if self.peek() == Some('-') {
                self.pos += 1;
                acc = FactExpr::Sub(Box::new(acc), Box::new(self.fact_term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn fact_term(&mut self) -> Result<FactExpr, ParseError> {
        let mut acc = self.fact_atom()?;
        loop {
            if self.eat('*') {
                acc = FactExpr::Mul(Box::new(acc), Box::new(self.fact_atom()?));
            } else if self.eat('/') {
                acc = FactExpr::Div(Box::new(acc), Box::new(self.fact_atom()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn fact_atom(&mut self) -> Result<FactExpr, ParseError> {
        if self.eat('(') {
            let inner = self.fact_expr()?;
            self.expect(')')?;
            return Ok(inner);
        }
        let n = self.nat()?;
        if self.eat('!') {
            Ok(FactExpr::Factorial(n))
        } else {
            Ok(FactExpr::Int(n))
        }
    }
}

impl IndexSet {
    pub fn parse(text: &str) -> Result<IndexSet, ParseError> {
        let mut cursor = Cursor::new(text);
        let set = cursor.parse_set()?;
        cursor.finish()?;
        Ok(set)
    }
}

impl FromStr for IndexSet {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IndexSet::parse(s)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexSet::Finite(elems) => {
                write!(f, "finite{{")?;
                for (i, e) in elems.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "}}")
            }
            IndexSet::ArithProg { .. } if self.is_naturals() => write!(f, "nat"),
            IndexSet::ArithProg { start, step } => write!(f, "ap({start},{step})"),
            IndexSet::Interval { lo, hi } => write!(f, "interval({lo},{hi})"),
            IndexSet::FactorialPoints(base) => write!(f, "factorials({base})"),
            IndexSet::FactorialIntervals(FactorialFamily::Explicit(blocks)) => {
                write!(f, "fintervals[")?;
                for (i, b) in blocks.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "({}, {})", b.lo(), b.hi())?;
                }
                write!(f, "]")
            }
            IndexSet::FactorialIntervals(FactorialFamily::Alternating(seq)) => {
                write!(f, "falt({seq})")
            }
            IndexSet::FactorialIntervals(FactorialFamily::Cover(seq)) => write!(f, "fcover({seq})"),
            IndexSet::EnumThreshold(r) => write!(f, "qge({})", format_rational(r)),
            IndexSet::Union(a, b) => write!(f, "union({a}, {b})"),
            IndexSet::Inter(a, b) => write!(f, "inter({a}, {b})"),
            IndexSet::Diff(a, b) => write!(f, "diff({a}, {b})"),
            IndexSet::Compl(a) => write!(f, "compl({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        for text in [
            "finite{1,2,3}",
            "finite{}",
            "ap(2,3)",
            "nat",
            "interval(4,9)",
            "factorials(nat)",
            "factorials(finite{1,2,3,4,7})",
            "fintervals[(1!, 2!); (3!, 5! - 5!/4!); (6!, 7! - 2*(7!/6!))]",
            "falt(nat)",
            "fcover(ap(2,1))",
            "qge(1/3)",
            "union(ap(1,2), ap(2,2))",
            "inter(nat, compl(factorials(nat)))",
            "diff(factorials(nat), finite{1})",
        ] {
            let set = IndexSet::parse(text).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(set.to_string(), text);
        }
    }

    #[test]
    fn whitespace_and_defaults() {
        let a = IndexSet::parse("  union ( ap( 1 , 2 ) ,\n ap(2,2) ) ").unwrap();
        assert_eq!(a, IndexSet::parse("union(ap(1,2),ap(2,2))").unwrap());
        assert_eq!(
            IndexSet::parse("factorials").unwrap(),
            IndexSet::parse("factorials(nat)").unwrap()
        );
        assert_eq!(
            IndexSet::parse("factorials()").unwrap(),
            IndexSet::parse("factorials(nat)").unwrap()
        );
        let three = IndexSet::parse("union(finite{1}, finite{2}, finite{3})").unwrap();
        assert_eq!(
            three.to_string(),
            "union(union(finite{1}, finite{2}), finite{3})"
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = IndexSet::parse("union(ap(1,2), bogus(3))").unwrap_err();
        assert_eq!(err.position, 15);
        let err = IndexSet::parse("finite{3,2}").unwrap_err();
        assert_eq!(err.position, 0);
        let err = IndexSet::parse("ap(1,2) extra").unwrap_err();
        assert_eq!(err.position, 8);
        let err = IndexSet::parse("ap(0,2)").unwrap_err();
        assert!(err.message.contains("start >= 1"));
        let err = IndexSet::parse("fintervals[(3!, 2!)]").unwrap_err();
        assert_eq!(err.position, 11);
        assert!(IndexSet::parse("ap(1,").is_err());
    }
}
