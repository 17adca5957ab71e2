//! Symbolic infinite utility streams `x = (x_1, x_2, ...)` with exact rational values.

mod compare;
mod dsl;
mod perm;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub use compare::{compare, strict_set, Cell, CellValue, Comparison, Scan, StrictSet, Unresolved};
pub use perm::FinitePermutation;

use crate::setalg::{Finiteness, IndexSet, ParseError, SetError};

/// Default number of coordinates scanned by pointwise checks.
pub const DEFAULT_HORIZON: u64 = 5040;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StreamError {
    #[error("clauses {first} and {second} overlap at t = {t}")]
    Overlap {
        first: usize,
        second: usize,
        t: String,
    },
    #[error("rank-fill set has a finite complement (last gap at or below {bound})")]
    FiniteComplement { bound: String },
    #[error("coordinate {0} is outside the stream's range")]
    OutOfRange(String),
    #[error("invalid permutation: {0}")]
    Permutation(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stream {
    /// Value of the first clause whose set contains `t`, else `default`.
    Piecewise {
        default: BigRational,
        clauses: Vec<(IndexSet, BigRational)>,
    },
    /// `fill_value` on `fill_set`; `m + 1` at the `m`-th element of its complement.
    RankFill {
        fill_set: IndexSet,
        fill_value: BigRational,
    },
    /// `y_t = base_{π(t)}`.
    Permuted {
        base: Box<Stream>,
        perm: FinitePermutation,
    },
}

pub fn nat(n: u64) -> BigUint {
    BigUint::from(n)
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Stream {
    pub fn constant(value: BigRational) -> Self {
        Stream::Piecewise {
            default: value,
            clauses: Vec::new(),
        }
    }

    /// Piecewise stream with clause sets checked for overlap: structurally when
    /// possible, else by scanning `[1, horizon]`.
    pub fn piecewise(
        default: BigRational,
        clauses: Vec<(IndexSet, BigRational)>,
        horizon: u64,
    ) -> Result<Self, StreamError> {
        for i in 0..clauses.len() {
            for j in (i + 1)..clauses.len() {
                let (a, b) = (&clauses[i].0, &clauses[j].0);
                if a.disjoint_from(b) {
                    continue;
                }
                let both = IndexSet::inter(a.clone(), b.clone());
                let scanned = both.elements_upto(horizon).first().copied().map(nat);
                let witness = match scanned {
                    Some(t) => Some(t),
                    None if both.is_empty() == Some(false) => both.nth(1).ok(),
                    None => None,
                };
                if let Some(t) = witness {
                    return Err(StreamError::Overlap {
                        first: i + 1,
                        second: j + 1,
                        t: t.to_string(),
                    });
                }
            }
        }
        Ok(Stream::Piecewise { default, clauses })
    }

    pub fn rank_fill(fill_set: IndexSet, fill_value: BigRational) -> Result<Self, StreamError> {
        if let Finiteness::Finite(bound) = fill_set.cofiniteness() {
            return Err(StreamError::FiniteComplement {
                bound: bound.to_string(),
            });
        }
        Ok(Stream::RankFill {
            fill_set,
            fill_value,
        })
    }

    pub fn permuted(base: Stream, perm: FinitePermutation) -> Self {
        Stream::Permuted {
            base: Box::new(base),
            perm,
        }
    }

    pub fn apply_permutation(&self, perm: &FinitePermutation) -> Self {
        Stream::permuted(self.clone(), perm.clone())
    }

    pub fn eval(&self, t: &BigUint) -> Result<BigRational, StreamError> {
        if t.is_zero() {
            return Err(StreamError::OutOfRange("0".into()));
        }
        match self {
            Stream::Piecewise { default, clauses } => Ok(clauses
                .iter()
                .find(|(set, _)| set.member(t))
                .map_or_else(|| default.clone(), |(_, v)| v.clone())),
            Stream::RankFill {
                fill_set,
                fill_value,
            } => {
                if fill_set.member(t) {
                    Ok(fill_value.clone())
                } else {
                    // t is the (t - |U ∩ [1,t]|)-th gap
                    let rank = t - fill_set.count(t);
                    Ok(BigRational::from_integer(BigInt::from(rank + 1u32)))
                }
            }
            Stream::Permuted { base, perm } => match t.to_u64() {
                Some(small) => base.eval(&nat(perm.apply(small))),
                None => base.eval(t),
            },
        }
    }

    pub fn at(&self, t: u64) -> BigRational {
        self.eval(&nat(t)).expect("coordinate in range")
    }

    /// `(x_1, ..., x_n)`.
    pub fn prefix(&self, n: u64) -> Vec<BigRational> {
        let len = n as usize;
        match self {
            Stream::Piecewise { default, clauses } => {
                let mut out = vec![None; len + 1];
                for (set, value) in clauses {
                    let mask = set.mask(len);
                    for t in 1..=len {
                        if mask[t] && out[t].is_none() {
                            out[t] = Some(value);
                        }
                    }
                }
                out.into_iter()
                    .skip(1)
                    .map(|v| v.unwrap_or(default).clone())
                    .collect()
            }
            Stream::RankFill {
                fill_set,
                fill_value,
            } => {
                let mask = fill_set.mask(len);
                let mut rank = 0i64;
                (1..=len)
                    .map(|t| {
                        if mask[t] {
                            fill_value.clone()
                        } else {
                            rank += 1;
                            int(rank + 1)
                        }
                    })
                    .collect()
            }
            Stream::Permuted { base, perm } => {
                let inner = base.prefix(n.max(perm.bound()));
                (1..=n)
                    .map(|t| inner[perm.apply(t) as usize - 1].clone())
                    .collect()
            }
        }
    }

    /// Least upper bound on `|x_t|` over all `t`, when one exists structurally.
    pub fn abs_bound(&self) -> Option<BigRational> {
        match self {
            Stream::Piecewise { default, clauses } => Some(
                clauses
                    .iter()
                    .map(|(_, v)| v.abs())
                    .fold(default.abs(), |a, b| if b > a { b } else { a }),
            ),
            Stream::RankFill { .. } => None,
            Stream::Permuted { base, .. } => base.abs_bound(),
        }
    }

    /// The same stream with every value increased by `delta`.
    pub fn shifted(&self, delta: &BigRational) -> Option<Self> {
        match self {
            Stream::Piecewise { default, clauses } => Some(Stream::Piecewise {
                default: default + delta,
                clauses: clauses
                    .iter()
                    .map(|(s, v)| (s.clone(), v + delta))
                    .collect(),
            }),
            Stream::Permuted { base, perm } => {
                Some(Stream::permuted(base.shifted(delta)?, perm.clone()))
            }
            Stream::RankFill { .. } => None,
        }
    }

    /// Every value is an integer.
    pub fn is_integer_valued(&self) -> bool {
        match self {
            Stream::Piecewise { default, clauses } => {
                default.is_integer() && clauses.iter().all(|(_, v)| v.is_integer())
            }
            Stream::RankFill { fill_value, .. } => fill_value.is_integer(),
            Stream::Permuted { base, .. } => base.is_integer_valued(),
        }
    }
}

impl From<i64> for Stream {
    fn from(v: i64) -> Self {
        Stream::constant(int(v))
    }
}

#[cfg(test)]
mod tests;
