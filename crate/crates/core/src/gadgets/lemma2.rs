//! The block gadget: for an increasing sequence `N = (n_k)`,
//! `U_k(N) = ((n_{2k−1})!, (n_{2k+1})! − (n_{2k+1})!/(n_{2k})!]`; `x(N)` is 1 off
//! `U(N) = ⋃ U_k(N)` and ranks its elements, and `y(N) = x(N \ {n_1})`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{
    density_one, param, set_inclusion, window_permutation, GadgetError, GadgetReport, Link,
    PermutationRecord, WINDOW_LIMIT,
};
use crate::axioms::{
    anonymity_equivalent, density_one_dominates, weakly_dominates, RelationVerdict, Status,
};
use crate::num::factorial_u64;
use crate::setalg::{Finiteness, IndexSet};
use crate::streams::{compare, int, Stream};

/// Largest sequence element fed to factorial arithmetic.
pub const MAX_TERM: u64 = 5000;
/// Largest `m` tried when searching for the cardinality condition.
pub const MAX_M: u64 = 64;
const LISTED: u64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma2Case {
    A,
    B,
    C,
}

impl Lemma2Case {
    pub fn name(self) -> &'static str {
        match self {
            Lemma2Case::A => "a",
            Lemma2Case::B => "b",
            Lemma2Case::C => "c",
        }
    }

    fn min_m(self) -> u64 {
        match self {
            Lemma2Case::A => 0,
            Lemma2Case::B => 2,
            Lemma2Case::C => 3,
        }
    }
}

impl fmt::Display for Lemma2Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma2Case {
    type Err = GadgetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Lemma2Case::A),
            "b" => Ok(Lemma2Case::B),
            "c" => Ok(Lemma2Case::C),
            other => Err(GadgetError::UnknownCase(other.to_string())),
        }
    }
}

fn check_increasing(t: &[u64]) -> Result<(), GadgetError> {
    let ok = t.first().map_or(true, |&a| a >= 1) && t.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(GadgetError::Sequence(format!("{t:?}")));
    }
    match t.iter().find(|&&v| v > MAX_TERM) {
        Some(v) => Err(GadgetError::TooLarge(v.to_string())),
        None => Ok(()),
    }
}

/// The listed prefix followed by every integer past its last element; ℕ when empty.
pub fn sequence_from_prefix(prefix: &[u64]) -> Result<IndexSet, GadgetError> {
    check_increasing(prefix)?;
    Ok(match prefix.last() {
        None => IndexSet::naturals(),
        Some(&last) => IndexSet::union(
            IndexSet::finite(prefix.to_vec()).expect("checked increasing"),
            IndexSet::arith_prog(last + 1, 1u32).expect("positive start"),
        ),
    })
}

fn term(seq: &IndexSet, k: u64) -> Result<u64, GadgetError> {
    let v = seq
        .nth(k)
        .map_err(|e| GadgetError::Sequence(e.to_string()))?;
    v.to_u64()
        .filter(|&v| v <= MAX_TERM)
        .ok_or_else(|| GadgetError::TooLarge(v.to_string()))
}

fn fact(seq: &IndexSet, k: u64) -> Result<BigUint, GadgetError> {
    Ok(factorial_u64(term(seq, k)?))
}

/// `(n_a)! / (n_b)!` for `a ≥ b`.
fn ratio(seq: &IndexSet, a: u64, b: u64) -> Result<BigUint, GadgetError> {
    Ok(fact(seq, a)? / fact(seq, b)?)
}

/// `|U_k(N)| = (n_{2k+1})! − (n_{2k+1})!/(n_{2k})! − (n_{2k−1})!`.
fn block_size(seq: &IndexSet, k: u64) -> Result<BigUint, GadgetError> {
    let hi = fact(seq, 2 * k + 1)?;
    let cut = &hi / fact(seq, 2 * k)?;
    let lo = fact(seq, 2 * k - 1)?;
    let size = BigInt::from(hi) - BigInt::from(cut) - BigInt::from(lo);
    Ok(size.to_biguint().unwrap_or_default())
}

/// Block sizes on the left of the case condition, and the sum on its right.
fn condition(case: Lemma2Case, seq: &IndexSet, m: u64) -> Result<(BigUint, BigUint), GadgetError> {
    let (lhs, from) = match case {
        Lemma2Case::A => return Ok((BigUint::zero(), BigUint::one())),
        Lemma2Case::B => (block_size(seq, 1)?, 2),
        Lemma2Case::C => (block_size(seq, 1)? + block_size(seq, 2)?, 3),
    };
    let mut rhs = BigUint::zero();
    for k in from..=m {
        rhs += ratio(seq, 2 * k + 1, 2 * k)?;
    }
    Ok((lhs, rhs))
}

#[derive(Clone, Debug)]
pub struct Lemma2Gadget {
    pub case: Lemma2Case,
    pub m: Option<u64>,
    pub t: IndexSet,
    pub s: IndexSet,
    pub x_t: Stream,
    pub y_t: Stream,
    pub x_s: Stream,
    pub y_s: Stream,
    /// `|U_1(T)|` (and `|U_2(T)|` in case c) against the sum of ratios.
    pub condition: Option<(BigUint, BigUint)>,
}

/// `x(N)`: 1 off `U(N)`, `k + 1` at the `k`-th element of `U(N)`.
pub fn block_stream(seq: &IndexSet) -> Stream {
    Stream::rank_fill(IndexSet::compl(IndexSet::cover_blocks(seq.clone())), int(1))
        .expect("cover blocks of an infinite sequence are infinite")
}

fn drop_first(seq: &IndexSet) -> Result<IndexSet, GadgetError> {
    let first = seq
        .nth(1)
        .map_err(|e| GadgetError::Sequence(e.to_string()))?;
    Ok(IndexSet::diff(
        seq.clone(),
        IndexSet::finite([first]).expect("one point"),
    ))
}

/// Builds the streams of one case; for cases b and c the least admissible `m`
/// is searched when `m` is not given.
pub fn lemma2_build(
    prefix: &[u64],
    case: Lemma2Case,
    m: Option<u64>,
) -> Result<Lemma2Gadget, GadgetError> {
    let t = sequence_from_prefix(prefix)?;
    let (m, cond) = match case {
        Lemma2Case::A => (None, None),
        _ => {
            let admissible = |m: u64| -> Result<(bool, BigUint, BigUint), GadgetError> {
                let (lhs, rhs) = condition(case, &t, m)?;
                Ok((lhs < rhs, lhs, rhs))
            };
            match m {
                Some(m) if m < case.min_m() => {
                    return Err(GadgetError::SmallM {
                        m,
                        min: case.min_m(),
                    })
                }
                Some(m) => match admissible(m)? {
                    (true, lhs, rhs) => (Some(m), Some((lhs, rhs))),
                    (false, lhs, rhs) => {
                        return Err(GadgetError::Condition {
                            m,
                            lhs: lhs.to_string(),
                            rhs: rhs.to_string(),
                        })
                    }
                },
                None => {
                    let mut found = None;
                    for m in case.min_m()..=MAX_M {
                        if let (true, lhs, rhs) = admissible(m)? {
                            found = Some((m, lhs, rhs));
                            break;
                        }
                    }
                    let (m, lhs, rhs) = found.ok_or(GadgetError::NoAdmissibleM(MAX_M))?;
                    (Some(m), Some((lhs, rhs)))
                }
            }
        }
    };
    let dropped: Vec<u64> = match (case, m) {
        (Lemma2Case::A, _) => vec![1],
        (Lemma2Case::B, Some(m)) => std::iter::once(1).chain(4..=2 * m + 1).collect(),
        (Lemma2Case::C, Some(m)) => [1, 2, 3].into_iter().chain(6..=2 * m + 1).collect(),
        _ => unreachable!("cases b and c carry m"),
    };
    let points = dropped
        .iter()
        .map(|&k| term(&t, k))
        .collect::<Result<Vec<_>, _>>()?;
    let s = IndexSet::diff(
        t.clone(),
        IndexSet::finite(points).expect("increasing terms"),
    );
    Ok(Lemma2Gadget {
        case,
        m,
        x_t: block_stream(&t),
        y_t: block_stream(&drop_first(&t)?),
        x_s: block_stream(&s),
        y_s: block_stream(&drop_first(&s)?),
        t,
        s,
        condition: cond,
    })
}

fn listed(seq: &IndexSet, k: u64) -> String {
    let v: Vec<String> = (1..=k)
        .map_while(|i| seq.nth(i).ok())
        .map(|v| v.to_string())
        .collect();
    v.join(",")
}

/// `a = b` at every coordinate.
fn equal_streams(a: &Stream, b: &Stream, h: u64) -> RelationVerdict {
    let (p, q) = (weakly_dominates(a, b, h), weakly_dominates(b, a, h));
    match (p.status, q.status) {
        (Status::Holds, Status::Holds) => p.detail("equal at every coordinate"),
        (Status::Fails, _) => p,
        (_, Status::Fails) => q,
        _ => RelationVerdict::new(Status::Undecided, h),
    }
}

struct Window<'a> {
    perm: &'a str,
    moving: (&'a str, &'a Stream),
    fixed: (&'a str, &'a Stream),
    lo: BigUint,
    hi: BigUint,
    /// The permuted stream should end above the fixed one.
    above: bool,
}

/// Rearranges the moving stream on `[lo, hi]` and checks the resulting dominance.
fn window_links(report: &mut GadgetReport, w: Window<'_>, h: u64) {
    let (mn, ms) = w.moving;
    let (fname, fs) = w.fixed;
    let permuted = format!("{mn}∘{}", w.perm);
    let claim = format!("{} rearranges {mn} on [{}, {}]", w.perm, w.lo, w.hi);
    let range =
        w.lo.to_u64()
            .zip(w.hi.to_u64())
            .filter(|&(lo, hi)| lo >= 1 && hi <= h && hi <= WINDOW_LIMIT);
    let Some((lo, hi)) = range else {
        report.links.push(Link::undecided(
            claim,
            h,
            format!("window end {} is beyond the horizon {h}", w.hi),
        ));
        return;
    };
    let perm = match window_permutation(ms, fs, lo, hi, w.above) {
        Ok(p) => p,
        Err(e) => {
            report.links.push(Link::check(claim, false, h, e));
            return;
        }
    };
    report.links.push(Link::check(
        claim,
        true,
        h,
        format!("{} points moved", perm.moved().len()),
    ));
    let mp = ms.apply_permutation(&perm);
    let (weak, strict) = if w.above {
        (
            Link::verified(
                format!("{permuted} ≥ {fname}"),
                weakly_dominates(&mp, fs, h),
            ),
            Link::verified(
                format!("{fname} ≺ {permuted} under density-one Pareto"),
                density_one_dominates(&mp, fs, h),
            ),
        )
    } else {
        (
            Link::verified(
                format!("{permuted} ≤ {fname}"),
                weakly_dominates(fs, &mp, h),
            ),
            Link::verified(
                format!("{permuted} ≺ {fname} under density-one Pareto"),
                density_one_dominates(fs, &mp, h),
            ),
        )
    };
    report.links.push(weak);
    let same = anonymity_equivalent(&mp, ms, h);
    report.links.push(Link::check(
        format!("{permuted} ∼ {mn} under anonymity"),
        same == Some(true),
        h,
        format!("{same:?}"),
    ));
    report.links.push(strict);
    report.streams.push((format!("{mn}_{}", w.perm), mp));
    report.permutations.push(PermutationRecord {
        name: w.perm.to_string(),
        bound: perm.bound(),
        moved: perm.moved().len(),
        perm,
    });
}

/// Verifies every checkable link of the case chain; the comparison the case
/// assumes is reported as such.
pub fn lemma2_verify_case(g: &Lemma2Gadget, horizon: u64) -> Result<GadgetReport, GadgetError> {
    let h = horizon;
    let chain = match g.case {
        Lemma2Case::A => "y(S) ≺ x(T) ≺ y(T) ∼ x(S)",
        Lemma2Case::B => "x(S) ≺ y(T) ≺ x(T) ≺ y(S)",
        Lemma2Case::C => "x(S) ≺ y(T) ∼ x(T) ≺ y(S)",
    };
    let mut params = vec![
        param("T", listed(&g.t, LISTED)),
        param("S", listed(&g.s, LISTED)),
        param("chain", chain),
    ];
    if let Some(m) = g.m {
        params.push(param("m", m));
    }
    let mut report = GadgetReport::new("lemma2", Some(g.case.name().into()), params);
    report.streams = vec![
        ("x_T".into(), g.x_t.clone()),
        ("y_T".into(), g.y_t.clone()),
        ("x_S".into(), g.x_s.clone()),
        ("y_S".into(), g.y_s.clone()),
    ];
    if let Some((lhs, rhs)) = &g.condition {
        report.links.push(Link::check(
            "cardinality condition",
            lhs < rhs,
            h,
            format!("{lhs} < {rhs}"),
        ));
    }
    report
        .links
        .push(Link::verified("S ⊆ T", set_inclusion(&g.s, &g.t, h)));
    let f = |k: u64| fact(&g.t, k);
    match g.case {
        Lemma2Case::A => {
            report.links.push(Link::verified(
                "y(T) = x(S)",
                equal_streams(&g.y_t, &g.x_s, h),
            ));
            report.links.push(Link::verified(
                "x(T) ≥ y(S)",
                weakly_dominates(&g.x_t, &g.y_s, h),
            ));
            let blocks = IndexSet::cover_blocks(g.t.clone());
            match compare(&g.x_t, &g.y_s, h) {
                Ok(c) => report.links.push(Link::verified(
                    "U(T) ⊆ {x(T) > y(S)}",
                    set_inclusion(&blocks, &c.gt, h),
                )),
                Err(e) => {
                    report
                        .links
                        .push(Link::undecided("U(T) ⊆ {x(T) > y(S)}", h, format!("{e:?}")))
                }
            }
            report
                .links
                .push(Link::verified("d(U(T)) = 1", density_one(&blocks, h)));
            report.links.push(Link::verified(
                "y(S) ≺ x(T) under density-one Pareto",
                density_one_dominates(&g.x_t, &g.y_s, h),
            ));
            report.links.push(Link::assumed("x(T) ≺ y(T)", h));
        }
        Lemma2Case::B => {
            let m = g.m.expect("case b carries m");
            let agree_to = f(4)? - f(4)? / f(3)?;
            match agree_to.to_u64().filter(|&n| n <= h) {
                Some(n) => {
                    let same = g.y_t.prefix(n) == g.x_s.prefix(n);
                    report.links.push(Link::check(
                        format!("y(T) = x(S) on [1, {n}]"),
                        same,
                        h,
                        "scanned",
                    ));
                }
                None => report.links.push(Link::undecided(
                    "y(T) = x(S) on [1, t_4! − t_4!/t_3!]",
                    h,
                    "window beyond the horizon",
                )),
            }
            report.links.push(Link::verified(
                "{x(S) > y(T)} is finite",
                finite_excess(&g.y_t, &g.x_s, h),
            ));
            let w1 = Window {
                perm: "pi",
                moving: ("x(S)", &g.x_s),
                fixed: ("y(T)", &g.y_t),
                lo: f(2)?,
                hi: f(2 * m + 2)?,
                above: false,
            };
            window_links(&mut report, w1, h);
            report.links.push(Link::assumed("y(T) ≺ x(T)", h));
            let top = f(2 * m + 3)?;
            let hi = &top - &top / f(2 * m + 2)?;
            let w2 = Window {
                perm: "sigma",
                moving: ("y(S)", &g.y_s),
                fixed: ("x(T)", &g.x_t),
                lo: BigUint::one(),
                hi,
                above: true,
            };
            window_links(&mut report, w2, h);
        }
        Lemma2Case::C => {
            let m = g.m.expect("case c carries m");
            let w1 = Window {
                perm: "pi",
                moving: ("x(S)", &g.x_s),
                fixed: ("y(T)", &g.y_t),
                lo: f(2)? + 1u32,
                hi: f(2 * m + 2)?,
                above: false,
            };
            window_links(&mut report, w1, h);
            report.links.push(Link::assumed("y(T) ∼ x(T)", h));
            let w2 = Window {
                perm: "sigma",
                moving: ("x(T)", &g.x_t),
                fixed: ("y(S)", &g.y_s),
                lo: f(1)? + 1u32,
                hi: f(2 * m + 2)?,
                above: false,
            };
            window_links(&mut report, w2, h);
        }
    }
    Ok(report.finish())
}

/// `{a < b}` is finite.
fn finite_excess(a: &Stream, b: &Stream, h: u64) -> RelationVerdict {
    match compare(a, b, h) {
        Ok(c) => match c.lt.finiteness() {
            Finiteness::Finite(bound) => {
                RelationVerdict::new(Status::Holds, h).detail(format!("contained in [1, {bound}]"))
            }
            Finiteness::Infinite => RelationVerdict::new(Status::Fails, h).detail("infinite"),
            Finiteness::Unknown => RelationVerdict::new(Status::Undecided, h),
        },
        Err(e) => RelationVerdict::new(Status::Undecided, h).detail(format!("{e:?}")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub t: Vec<u64>,
    pub m: u64,
    /// `t_{2m+2}! / t_3!`.
    #[serde(serialize_with = "super::as_text")]
    pub lhs: BigUint,
    /// `Σ_{j=2}^{m+1} t_{2j}! / t_{2j−1}!`.
    #[serde(serialize_with = "super::as_text")]
    pub rhs: BigUint,
    pub holds: bool,
    /// `(t_{2m+2}!/t_{2j}!)·(t_{2j−1}!/t_3!) − m` for `j = m+1, ..., 2`.
    #[serde(serialize_with = "super::as_texts")]
    pub parentheses: Vec<BigInt>,
    pub all_positive: bool,
    /// `m·(lhs − rhs)` equals the weighted sum of the parentheses.
    pub factored_form_matches: bool,
}

/// Checks `t_{2m+2}!/t_3! > Σ_{j=2}^{m+1} t_{2j}!/t_{2j−1}!` and its grouping
/// into `m` parentheses, all in exact integers.
pub fn check_l2e1(t: &[u64], m: u64) -> Result<InequalityCheck, GadgetError> {
    if m < 2 {
        return Err(GadgetError::SmallM { m, min: 2 });
    }
    check_increasing(t)?;
    let need = (2 * m + 2) as usize;
    if t.len() < need {
        return Err(GadgetError::Sequence(format!(
            "need {need} terms, got {}",
            t.len()
        )));
    }
    let f = |k: u64| factorial_u64(t[k as usize - 1]);
    let lhs = f(2 * m + 2) / f(3);
    let mut rhs = BigUint::zero();
    let mut parentheses = Vec::new();
    let mut weighted = BigInt::zero();
    for j in (2..=m + 1).rev() {
        let term = f(2 * j) / f(2 * j - 1);
        let factor =
            BigInt::from((f(2 * m + 2) / f(2 * j)) * (f(2 * j - 1) / f(3))) - BigInt::from(m);
        weighted += BigInt::from(term.clone()) * &factor;
        rhs += term;
        parentheses.push(factor);
    }
    let diff = BigInt::from(lhs.clone()) - BigInt::from(rhs.clone());
    Ok(InequalityCheck {
        t: t[..need].to_vec(),
        m,
        holds: lhs > rhs,
        all_positive: parentheses.iter().all(|p| p.is_positive()),
        factored_form_matches: diff * BigInt::from(m) == weighted,
        lhs,
        rhs,
        parentheses,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockCertificate {
    pub m: u64,
    /// `(n_{2m+1})!`.
    #[serde(serialize_with = "super::as_text")]
    pub checkpoint: BigUint,
    /// `|U_1(N)|, ..., |U_m(N)|` from the closed form.
    #[serde(serialize_with = "super::as_texts")]
    pub block_sizes: Vec<BigUint>,
    /// `|U(N) ∩ [1, (n_{2m+1})!]|` counted on the symbolic set.
    #[serde(serialize_with = "super::as_text")]
    pub counted: BigUint,
    pub counts_match: bool,
    /// `|U_m(N)| / (n_{2m+1})!`.
    #[serde(serialize_with = "super::as_text")]
    pub last_block_ratio: BigRational,
    /// `1 − 1/(n_{2m})! − (n_{2m−1})!/(n_{2m+1})!`.
    #[serde(serialize_with = "super::as_text")]
    pub lower_bound: BigRational,
    pub ratio_matches: bool,
}

/// Closed-form block counts against the symbolic count at `(n_{2m+1})!`.
pub fn block_certificate(prefix: &[u64], m: u64) -> Result<BlockCertificate, GadgetError> {
    if m < 1 {
        return Err(GadgetError::SmallM { m, min: 1 });
    }
    let seq = sequence_from_prefix(prefix)?;
    let checkpoint = fact(&seq, 2 * m + 1)?;
    let block_sizes = (1..=m)
        .map(|k| block_size(&seq, k))
        .collect::<Result<Vec<_>, _>>()?;
    let total: BigUint = block_sizes.iter().sum();
    let counted = IndexSet::cover_blocks(seq.clone()).count(&checkpoint);
    let big = |n: &BigUint| BigRational::from_integer(BigInt::from(n.clone()));
    let last_block_ratio = big(block_sizes.last().expect("m >= 1")) / big(&checkpoint);
    let lower_bound = BigRational::one()
        - BigRational::one() / big(&fact(&seq, 2 * m)?)
        - big(&fact(&seq, 2 * m - 1)?) / big(&checkpoint);
    Ok(BlockCertificate {
        m,
        counts_match: counted == total,
        ratio_matches: last_block_ratio == lower_bound,
        checkpoint,
        block_sizes,
        counted,
        last_block_ratio,
        lower_bound,
    })
}
