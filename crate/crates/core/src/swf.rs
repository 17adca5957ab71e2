//! Social welfare functions on streams and the orders they induce.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::num::{format_rational, nat_to_rational};
use crate::setalg::{checkpoint_schedule, Finiteness, IndexSet};
use crate::streams::Stream;

/// Longest prefix materialized to read off a period.
const PERIOD_PREFIX_LIMIT: u64 = 1 << 20;
/// Largest period for which the discounted closed form is used.
const DISCOUNT_PERIOD_LIMIT: u64 = 1 << 12;
/// Checkpoint factorial used for evidence unless a caller asks for more.
pub const DEFAULT_EVIDENCE_K: u64 = 7;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SwfError {
    #[error("discount factor {0} is not in (0, 1)")]
    Discount(String),
    #[error("tolerance {0} is not positive")]
    Tolerance(String),
    #[error("the stream has no structural bound, so the discounted series may diverge")]
    Unbounded,
    #[error("could not decide {0}")]
    Undecided(String),
    #[error("unknown welfare function `{0}` (expected cesaro, discounted, min or liminf)")]
    UnknownKind(String),
}

/// Partial average `Σ_{t≤n} x_t / n` at one checkpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AverageCheckpoint {
    pub n: u64,
    pub average: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SwfValue {
    Finite(BigRational),
    PlusInfinity,
    IntervalEstimate {
        lo: BigRational,
        hi: BigRational,
        evidence: Vec<AverageCheckpoint>,
    },
}

impl SwfValue {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            SwfValue::Finite(q) => Some(q),
            _ => None,
        }
    }

    /// `Some` ordering when the values are comparable without guessing.
    pub fn compare(&self, other: &SwfValue) -> Option<Ordering> {
        use SwfValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(a.cmp(b)),
            (PlusInfinity, PlusInfinity) => Some(Ordering::Equal),
            (PlusInfinity, Finite(_)) => Some(Ordering::Greater),
            (Finite(_), PlusInfinity) => Some(Ordering::Less),
            (PlusInfinity, IntervalEstimate { .. }) | (IntervalEstimate { .. }, PlusInfinity) => {
                None
            }
            _ => {
                let (alo, ahi) = self.bounds()?;
                let (blo, bhi) = other.bounds()?;
                if alo > bhi {
                    Some(Ordering::Greater)
                } else if ahi < blo {
                    Some(Ordering::Less)
                } else {
                    None
                }
            }
        }
    }

    fn bounds(&self) -> Option<(&BigRational, &BigRational)> {
        match self {
            SwfValue::Finite(q) => Some((q, q)),
            SwfValue::IntervalEstimate { lo, hi, .. } => Some((lo, hi)),
            SwfValue::PlusInfinity => None,
        }
    }
}

impl fmt::Display for SwfValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwfValue::Finite(q) => f.write_str(&format_rational(q)),
            SwfValue::PlusInfinity => f.write_str("+inf"),
            SwfValue::IntervalEstimate { lo, hi, .. } => {
                write!(f, "[{}, {}]", format_rational(lo), format_rational(hi))
            }
        }
    }
}

impl Serialize for SwfValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SwfValue", 3)?;
        match self {
            SwfValue::Finite(q) => {
                st.serialize_field("kind", "finite")?;
                st.serialize_field("value", &format_rational(q))?;
            }
            SwfValue::PlusInfinity => {
                st.serialize_field("kind", "plus_infinity")?;
                st.serialize_field("value", "+inf")?;
            }
            SwfValue::IntervalEstimate { lo, hi, evidence } => {
                st.serialize_field("kind", "interval_estimate")?;
                st.serialize_field("value", &[format_rational(lo), format_rational(hi)])?;
                st.serialize_field("evidence", evidence)?;
            }
        }
        st.end()
    }
}

/// `(T, P)` such that `x_{t+P} = x_t` for every `t > T`.
pub fn eventual_period(x: &Stream) -> Option<(BigUint, BigUint)> {
    match x {
        Stream::Piecewise { clauses, .. } => {
            let mut threshold = BigUint::zero();
            let mut period = BigUint::one();
            for (set, _) in clauses {
                let p = set.periodic()?;
                threshold = threshold.max(p.threshold);
                period = period.lcm(&p.period);
            }
            Some((threshold, period))
        }
        Stream::RankFill { .. } => None,
        Stream::Permuted { base, perm } => {
            let (t, p) = eventual_period(base)?;
            Some((t.max(BigUint::from(perm.bound())), p))
        }
    }
}

fn small_period(x: &Stream) -> Option<(u64, u64)> {
    let (t, p) = eventual_period(x)?;
    let (t, p) = (t.to_u64()?, p.to_u64()?);
    (t.checked_add(p)? <= PERIOD_PREFIX_LIMIT).then_some((t, p))
}

/// Partial averages at the checkpoint schedule up to `max_k!`.
pub fn partial_averages(x: &Stream, max_k: u64) -> Vec<AverageCheckpoint> {
    let points = checkpoint_schedule(max_k);
    let Some(&last) = points.last() else {
        return Vec::new();
    };
    let values = x.prefix(last);
    let mut out = Vec::new();
    let mut sum = BigRational::zero();
    let mut next = points.iter().peekable();
    for (i, v) in values.iter().enumerate() {
        sum += v;
        let n = i as u64 + 1;
        if next.peek() == Some(&&n) {
            next.next();
            let avg = &sum / nat_to_rational(&BigUint::from(n));
            out.push(AverageCheckpoint {
                n,
                average: format_rational(&avg),
            });
        }
    }
    out
}

fn estimate_from(evidence: Vec<AverageCheckpoint>) -> SwfValue {
    let tail: Vec<BigRational> = evidence[evidence.len() / 2..]
        .iter()
        .filter_map(|c| crate::num::parse_rational(&c.average))
        .collect();
    let lo = tail.iter().min().cloned().unwrap_or_else(BigRational::zero);
    let hi = tail.iter().max().cloned().unwrap_or_else(BigRational::zero);
    SwfValue::IntervalEstimate { lo, hi, evidence }
}

/// `liminf_n Σ_{t≤n} x_t / n`.
pub fn cesaro_liminf(x: &Stream) -> SwfValue {
    cesaro_with_evidence(x, DEFAULT_EVIDENCE_K)
}

pub fn cesaro_with_evidence(x: &Stream, max_k: u64) -> SwfValue {
    if let Some((t, p)) = small_period(x) {
        let values = x.prefix(t + p);
        let sum: BigRational = values[t as usize..].iter().sum();
        return SwfValue::Finite(sum / nat_to_rational(&BigUint::from(p)));
    }
    match x {
        Stream::Piecewise { default, clauses } => {
            // the limit exists when every clause set has a density
            let mut total = BigRational::zero();
            let mut covered = BigRational::zero();
            let mut exact = true;
            for (set, v) in clauses {
                match set.density().density() {
                    Some(d) => {
                        total += v * d;
                        covered += d;
                    }
                    None => exact = false,
                }
            }
            if exact {
                return SwfValue::Finite(total + default * (BigRational::one() - covered));
            }
        }
        Stream::RankFill { fill_set, .. } => {
            // the m-th gap carries m + 1, so gaps of positive lower density push the
            // partial averages past any bound
            let gaps = IndexSet::compl(fill_set.clone());
            if gaps.density().lower.lo().is_positive() {
                return SwfValue::PlusInfinity;
            }
        }
        Stream::Permuted { base, .. } => {
            // a finite permutation changes finitely many partial sums
            if let v @ (SwfValue::Finite(_) | SwfValue::PlusInfinity) =
                cesaro_with_evidence(base, max_k)
            {
                return v;
            }
        }
    }
    estimate_from(partial_averages(x, max_k))
}

fn check_discount(delta: &BigRational) -> Result<(), SwfError> {
    if delta.is_positive() && delta < &BigRational::one() {
        Ok(())
    } else {
        Err(SwfError::Discount(format_rational(delta)))
    }
}

/// `Σ_t δ^{t−1} x_t`: exact on eventually periodic streams, otherwise an interval of
/// width at most `2 tol` around a partial sum.
pub fn discounted_sum(
    x: &Stream,
    delta: &BigRational,
    tol: &BigRational,
) -> Result<SwfValue, SwfError> {
    check_discount(delta)?;
    if !tol.is_positive() {
        return Err(SwfError::Tolerance(format_rational(tol)));
    }
    let bound = x.abs_bound().ok_or(SwfError::Unbounded)?;
    if let Some((t, p)) = small_period(x).filter(|&(_, p)| p <= DISCOUNT_PERIOD_LIMIT) {
        let values = x.prefix(t + p);
        let head = geometric_partial(&values[..t as usize], delta);
        let cycle = geometric_partial(&values[t as usize..], delta);
        let factor = delta.pow(t as i32) / (BigRational::one() - delta.pow(p as i32));
        return Ok(SwfValue::Finite(head + cycle * factor));
    }
    // tail past n is at most B δ^n / (1 − δ)
    let one_minus = BigRational::one() - delta;
    let mut n = 0u64;
    let mut power = BigRational::one();
    while &bound * &power / &one_minus > *tol {
        power *= delta;
        n += 1;
    }
    let values = x.prefix(n);
    let partial = geometric_partial(&values, delta);
    let slack = &bound * &power / &one_minus;
    Ok(SwfValue::IntervalEstimate {
        lo: &partial - &slack,
        hi: &partial + &slack,
        evidence: vec![AverageCheckpoint {
            n,
            average: format_rational(&partial),
        }],
    })
}

fn geometric_partial(values: &[BigRational], delta: &BigRational) -> BigRational {
    // Horner from the last term
    values
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, v| v + delta * acc)
}

/// Values the stream takes at least once, as a finite list, when decidable.
fn attained_values(x: &Stream) -> Result<Vec<BigRational>, SwfError> {
    match x {
        Stream::Piecewise { default, clauses } => {
            let mut out = Vec::new();
            let mut all = Vec::new();
            for (set, v) in clauses {
                match set.is_empty() {
                    Some(false) => out.push(v.clone()),
                    Some(true) => {}
                    None => return Err(SwfError::Undecided(format!("emptiness of {set}"))),
                }
                all.push(set.clone());
            }
            let rest = IndexSet::compl(IndexSet::union_all(all));
            match rest.is_empty() {
                Some(false) => out.push(default.clone()),
                Some(true) => {}
                None => {
                    return Err(SwfError::Undecided(
                        "emptiness of the default region".into(),
                    ))
                }
            }
            Ok(out)
        }
        Stream::RankFill {
            fill_set,
            fill_value,
        } => {
            let mut out = vec![BigRational::from_integer(BigInt::from(2))];
            if fill_set.is_empty() == Some(false) {
                out.push(fill_value.clone());
            }
            Ok(out)
        }
        Stream::Permuted { base, .. } => attained_values(base),
    }
}

/// `min_t x_t`; every supported stream attains its infimum.
pub fn min_swf(x: &Stream) -> Result<SwfValue, SwfError> {
    let values = attained_values(x)?;
    Ok(SwfValue::Finite(
        values.into_iter().min().expect("some region is nonempty"),
    ))
}

/// `liminf_t x_t`.
pub fn liminf_swf(x: &Stream) -> Result<SwfValue, SwfError> {
    match x {
        Stream::Piecewise { default, clauses } => {
            let mut recurring = Vec::new();
            let mut all = Vec::new();
            for (set, v) in clauses {
                match set.finiteness() {
                    Finiteness::Infinite => recurring.push(v.clone()),
                    Finiteness::Finite(_) => {}
                    Finiteness::Unknown => {
                        return Err(SwfError::Undecided(format!("finiteness of {set}")))
                    }
                }
                all.push(set.clone());
            }
            match IndexSet::union_all(all).cofiniteness() {
                Finiteness::Infinite => recurring.push(default.clone()),
                Finiteness::Finite(_) => {}
                Finiteness::Unknown => {
                    return Err(SwfError::Undecided(
                        "finiteness of the default region".into(),
                    ))
                }
            }
            Ok(SwfValue::Finite(
                recurring
                    .into_iter()
                    .min()
                    .expect("an infinite region exists"),
            ))
        }
        Stream::RankFill {
            fill_set,
            fill_value,
        } => match fill_set.finiteness() {
            Finiteness::Infinite => Ok(SwfValue::Finite(fill_value.clone())),
            Finiteness::Finite(_) => Ok(SwfValue::PlusInfinity),
            Finiteness::Unknown => Err(SwfError::Undecided(format!("finiteness of {fill_set}"))),
        },
        Stream::Permuted { base, .. } => liminf_swf(base),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Swf {
    Cesaro,
    Discounted {
        delta: BigRational,
        tol: BigRational,
    },
    Min,
    Liminf,
}

impl Swf {
    pub fn name(&self) -> &'static str {
        match self {
            Swf::Cesaro => "cesaro",
            Swf::Discounted { .. } => "discounted",
            Swf::Min => "min",
            Swf::Liminf => "liminf",
        }
    }

    /// Builds a welfare function from its name; `delta` and `tol` apply to `discounted`.
    pub fn from_name(name: &str, delta: BigRational, tol: BigRational) -> Result<Swf, SwfError> {
        match name {
            "cesaro" => Ok(Swf::Cesaro),
            "discounted" => {
                check_discount(&delta)?;
                Ok(Swf::Discounted { delta, tol })
            }
            "min" => Ok(Swf::Min),
            "liminf" => Ok(Swf::Liminf),
            other => Err(SwfError::UnknownKind(other.to_string())),
        }
    }

    pub fn evaluate(&self, x: &Stream) -> Result<SwfValue, SwfError> {
        match self {
            Swf::Cesaro => Ok(cesaro_liminf(x)),
            Swf::Discounted { delta, tol } => discounted_sum(x, delta, tol),
            Swf::Min => min_swf(x),
            Swf::Liminf => liminf_swf(x),
        }
    }
}

impl FromStr for Swf {
    type Err = SwfError;

    /// Names only; `discounted` gets `δ = 1/2` and `tol = 1/10^6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let tol = BigRational::new(BigInt::one(), BigInt::from(1_000_000));
        Swf::from_name(s, half, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InducedOrder {
    Better,
    Indifferent,
    Worse,
    Undecided,
}

impl fmt::Display for InducedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InducedOrder::Better => "≻",
            InducedOrder::Indifferent => "∼",
            InducedOrder::Worse => "≺",
            InducedOrder::Undecided => "undecided",
        })
    }
}

/// `x ≿ y` iff `W(x) ≥ W(y)`.
pub fn induced_compare(w: &Swf, x: &Stream, y: &Stream) -> Result<InducedOrder, SwfError> {
    let (a, b) = (w.evaluate(x)?, w.evaluate(y)?);
    Ok(match a.compare(&b) {
        Some(Ordering::Greater) => InducedOrder::Better,
        Some(Ordering::Equal) => InducedOrder::Indifferent,
        Some(Ordering::Less) => InducedOrder::Worse,
        None => InducedOrder::Undecided,
    })
}
