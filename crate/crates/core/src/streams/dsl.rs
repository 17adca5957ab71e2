//! Text syntax for streams.
//!
//! ```text
//! const(v)
//! piecewise(default=v; SET:v1; SET:v2)
//! rankfill(SET)            rankfill(SET, fill=v)
//! permute(STREAM, perm[N](1->3,3->1))
//! ```

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{FinitePermutation, Stream, StreamError, DEFAULT_HORIZON};
use crate::num::format_rational;
use crate::setalg::{Cursor, ParseError};

fn parse_error(cursor: &Cursor<'_>, at: usize, err: StreamError) -> StreamError {
    match err {
        StreamError::Parse(p) => StreamError::Parse(p),
        other => StreamError::Parse(cursor.error_at(at, other.to_string())),
    }
}

fn small(cursor: &mut Cursor<'_>) -> Result<u64, ParseError> {
    let at = cursor.position();
    cursor
        .nat()?
        .to_u64()
        .ok_or_else(|| cursor.error_at(at, "number too large"))
}

fn parse_perm(cursor: &mut Cursor<'_>) -> Result<FinitePermutation, StreamError> {
    let start = cursor.position();
    let keyword = cursor.ident()?;
    if keyword != "perm" {
        return Err(cursor.error_at(start, "expected `perm[N](...)`").into());
    }
    cursor.expect('[')?;
    let bound = small(cursor)?;
    cursor.expect(']')?;
    cursor.expect('(')?;
    let mut pairs = Vec::new();
    if !cursor.eat(')') {
        loop {
            let from = small(cursor)?;
            if !cursor.eat_str("->") {
                return Err(cursor.error("expected `->`").into());
            }
            let to = small(cursor)?;
            pairs.push((from, to));
            if cursor.eat(')') {
                break;
            }
            cursor.expect(',')?;
        }
    }
    FinitePermutation::from_pairs(bound, &pairs).map_err(|e| parse_error(cursor, start, e))
}

fn parse_stream(cursor: &mut Cursor<'_>, horizon: u64) -> Result<Stream, StreamError> {
    cursor.skip_ws();
    let start = cursor.position();
    let keyword = cursor.ident()?;
    match keyword {
        "const" => {
            cursor.expect('(')?;
            let v = cursor.rational()?;
            cursor.expect(')')?;
            Ok(Stream::constant(v))
        }
        "piecewise" => {
            cursor.expect('(')?;
            if !cursor.eat_str("default") {
                return Err(cursor.error("expected `default=`").into());
            }
            cursor.expect('=')?;
            let default = cursor.rational()?;
            let mut clauses = Vec::new();
            while cursor.eat(';') {
                let set = cursor.parse_set()?;
                cursor.expect(':')?;
                let value = cursor.rational()?;
                clauses.push((set, value));
            }
            cursor.expect(')')?;
            Stream::piecewise(default, clauses, horizon).map_err(|e| parse_error(cursor, start, e))
        }
        "rankfill" => {
            cursor.expect('(')?;
            let set = cursor.parse_set()?;
            let fill = if cursor.eat(',') {
                if !cursor.eat_str("fill") {
                    return Err(cursor.error("expected `fill=`").into());
                }
                cursor.expect('=')?;
                cursor.rational()?
            } else {
                BigRational::one()
            };
            cursor.expect(')')?;
            Stream::rank_fill(set, fill).map_err(|e| parse_error(cursor, start, e))
        }
        "permute" => {
            cursor.expect('(')?;
            let base = parse_stream(cursor, horizon)?;
            cursor.expect(',')?;
            let perm = parse_perm(cursor)?;
            cursor.expect(')')?;
            Ok(Stream::permuted(base, perm))
        }
        other => Err(cursor
            .error_at(start, format!("unknown stream `{other}`"))
            .into()),
    }
}

impl Stream {
    pub fn parse(text: &str) -> Result<Stream, StreamError> {
        Self::parse_with_horizon(text, DEFAULT_HORIZON)
    }

    /// Parses a stream, scanning clause overlaps up to `horizon`.
    pub fn parse_with_horizon(text: &str, horizon: u64) -> Result<Stream, StreamError> {
        let mut cursor = Cursor::new(text);
        let stream = parse_stream(&mut cursor, horizon)?;
        cursor.finish()?;
        Ok(stream)
    }
}

impl FromStr for Stream {
    type Err = StreamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stream::parse(s)
    }
}

impl FinitePermutation {
    pub fn parse(text: &str) -> Result<FinitePermutation, StreamError> {
        let mut cursor = Cursor::new(text);
        let perm = parse_perm(&mut cursor)?;
        cursor.finish()?;
        Ok(perm)
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stream::Piecewise { default, clauses } if clauses.is_empty() => {
                write!(f, "const({})", format_rational(default))
            }
            Stream::Piecewise { default, clauses } => {
                write!(f, "piecewise(default={}", format_rational(default))?;
                for (set, value) in clauses {
                    write!(f, "; {set}:{}", format_rational(value))?;
                }
                write!(f, ")")
            }
            Stream::RankFill {
                fill_set,
                fill_value,
            } if fill_value.is_one() => {
                write!(f, "rankfill({fill_set})")
            }
            Stream::RankFill {
                fill_set,
                fill_value,
            } => {
                write!(
                    f,
                    "rankfill({fill_set}, fill={})",
                    format_rational(fill_value)
                )
            }
            Stream::Permuted { base, perm } => write!(f, "permute({base}, {perm})"),
        }
    }
}
