//! Structural decisions about index sets: finiteness, cofiniteness, eventual
//! periodicity, provable inclusion and disjointness, finite symmetric difference.
//!
//! Every answer here is either a proof from the expression structure or
//! `Unknown`; nothing is inferred from sampling.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{FactorialFamily, IndexSet};
use crate::num::factorial;

/// Periods larger than this are not expanded.
const MAX_PERIOD_BITS: u64 = 24;
/// Largest `k` for which `k!` is materialized as a bound.
const MAX_FACTORIAL_BOUND: u64 = 2000;
/// Finite lists and intervals up to this size are checked element by element.
const SMALL_SET: u64 = 512;

/// Structural finiteness of a set. `Finite(bound)` means every element is `<= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Finiteness {
    Finite(BigUint),
    Infinite,
    Unknown,
}

impl Finiteness {
    pub fn is_finite(&self) -> Option<bool> {
        match self {
            Finiteness::Finite(_) => Some(true),
            Finiteness::Infinite => Some(false),
            Finiteness::Unknown => None,
        }
    }

    fn union(self, other: Finiteness) -> Finiteness {
        match (self, other) {
            (Finiteness::Finite(a), Finiteness::Finite(b)) => Finiteness::Finite(a.max(b)),
            (Finiteness::Infinite, _) | (_, Finiteness::Infinite) => Finiteness::Infinite,
            _ => Finiteness::Unknown,
        }
    }
}

/// Outcome of the symmetric-difference test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SymDiffVerdict {
    /// The sets agree on every `t > bound`.
    Finite {
        bound: String,
    },
    Infinite,
    /// No structural proof either way; `last_seen` is the largest scanned element of the
    /// symmetric difference in `[1, horizon]`.
    Undecided {
        last_seen: Option<u64>,
        horizon: u64,
    },
}

/// Beyond `threshold`, membership repeats with period `period`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Periodic {
    pub threshold: BigUint,
    pub period: BigUint,
}

/// Intersection of two arithmetic progressions as a progression, if nonempty.
pub(crate) fn crt_merge(
    a1: &BigUint,
    d1: &BigUint,
    a2: &BigUint,
    d2: &BigUint,
) -> Option<(BigUint, BigUint)> {
    let (a1i, d1i, a2i, d2i) = (
        BigInt::from(a1.clone()),
        BigInt::from(d1.clone()),
        BigInt::from(a2.clone()),
        BigInt::from(d2.clone()),
    );
    let egcd = d1i.extended_gcd(&d2i);
    let g = egcd.gcd;
    let delta = &a2i - &a1i;
    if !(&delta % &g).is_zero() {
        return None;
    }
    let lcm = &d1i / &g * &d2i;
    // a1 + d1 * k ≡ a2 (mod d2)  =>  k ≡ (delta / g) * x (mod d2 / g)
    let modulus = &d2i / &g;
    let k = ((&delta / &g) * &egcd.x).mod_floor(&modulus);
    let base = (&a1i + &d1i * k).mod_floor(&lcm);
    let floor = a1i.clone().max(a2i.clone());
    // smallest t >= floor with t ≡ base (mod lcm)
    let mut t = &base + ((&floor - &base).div_ceil(&lcm)) * &lcm;
    if t < floor {
        t += &lcm;
    }
    debug_assert!(!t.is_negative());
    Some((t.to_biguint()?, lcm.to_biguint()?))
}

fn small_elements(set: &IndexSet) -> Option<Vec<BigUint>> {
    match set {
        IndexSet::Finite(elems) if elems.len() as u64 <= SMALL_SET => Some(elems.clone()),
        IndexSet::Interval { lo, hi } if hi - lo < BigUint::from(SMALL_SET) => {
            let mut out = Vec::new();
            let mut t = lo.clone();
            while &t <= hi {
                out.push(t.clone());
                t += 1u32;
            }
            Some(out)
        }
        _ => None,
    }
}

impl IndexSet {
    pub(crate) fn periodic(&self) -> Option<Periodic> {
        let simple = |threshold: BigUint| {
            Some(Periodic {
                threshold,
                period: BigUint::one(),
            })
        };
        match self {
            IndexSet::Finite(elems) => simple(elems.last().cloned().unwrap_or_default()),
            IndexSet::Interval { hi, .. } => simple(hi.clone()),
            IndexSet::ArithProg { start, step } => Some(Periodic {
                threshold: start - 1u32,
                period: step.clone(),
            }),
            IndexSet::EnumThreshold(r) => {
                if r <= &BigRational::zero() || r >= &BigRational::one() {
                    simple(BigUint::zero())
                } else {
                    None
                }
            }
            IndexSet::FactorialPoints(_) | IndexSet::FactorialIntervals(_) => {
                match self.leaf_finiteness() {
                    Finiteness::Finite(bound) => simple(bound),
                    _ => None,
                }
            }
            IndexSet::Compl(a) => a.periodic(),
            IndexSet::Union(a, b) | IndexSet::Inter(a, b) | IndexSet::Diff(a, b) => {
                let (pa, pb) = (a.periodic()?, b.periodic()?);
                let period = pa.period.lcm(&pb.period);
                if period.bits() > MAX_PERIOD_BITS {
                    return None;
                }
                Some(Periodic {
                    threshold: pa.threshold.max(pb.threshold),
                    period,
                })
            }
        }
    }

    /// Number of members in one period past the threshold, with the period length.
    fn periodic_profile(&self) -> Option<(Periodic, BigUint)> {
        let p = self.periodic()?;
        let end = &p.threshold + &p.period;
        let hits = self.count(&end) - self.count(&p.threshold);
        Some((p, hits))
    }

    /// Finiteness for the non-boolean leaves.
    fn leaf_finiteness(&self) -> Finiteness {
        match self {
            IndexSet::Finite(elems) => {
                Finiteness::Finite(elems.last().cloned().unwrap_or_default())
            }
            IndexSet::Interval { hi, .. } => Finiteness::Finite(hi.clone()),
            IndexSet::ArithProg { .. } => Finiteness::Infinite,
            IndexSet::EnumThreshold(r) => {
                if r < &BigRational::one() {
                    Finiteness::Infinite
                } else {
                    Finiteness::Finite(BigUint::zero())
                }
            }
            IndexSet::FactorialPoints(base) => match base.finiteness() {
                Finiteness::Finite(b) if b <= BigUint::from(MAX_FACTORIAL_BOUND) => {
                    Finiteness::Finite(factorial(&b))
                }
                Finiteness::Finite(_) => Finiteness::Unknown,
                other => other,
            },
            IndexSet::FactorialIntervals(FactorialFamily::Explicit(blocks)) => Finiteness::Finite(
                blocks
                    .last()
                    .map(|b| b.bounds().1.clone())
                    .unwrap_or_default(),
            ),
            IndexSet::FactorialIntervals(family) => {
                let seq = family.sequence().expect("patterned family");
                match seq.finiteness() {
                    Finiteness::Finite(b) if b <= BigUint::from(MAX_FACTORIAL_BOUND) => {
                        let blocks = family.blocks_upto(&factorial(&b));
                        Finiteness::Finite(
                            blocks.last().map(|(_, hi)| hi.clone()).unwrap_or_default(),
                        )
                    }
                    Finiteness::Finite(_) => Finiteness::Unknown,
                    other => other,
                }
            }
            _ => unreachable!("boolean nodes are not leaves"),
        }
    }

    /// Finiteness of the set: structural, else from its eventual value.
    pub fn finiteness(&self) -> Finiteness {
        match self.finiteness_structural() {
            Finiteness::Unknown => match self.guarded_eventual_value() {
                Some((false, b)) => Finiteness::Finite(b),
                Some((true, _)) => Finiteness::Infinite,
                None => Finiteness::Unknown,
            },
            known => known,
        }
    }

    /// Finiteness of the complement `ℕ \ S`.
    pub fn cofiniteness(&self) -> Finiteness {
        match self.cofiniteness_structural() {
            Finiteness::Unknown => match self.guarded_eventual_value() {
                Some((true, b)) => Finiteness::Finite(b),
                Some((false, _)) => Finiteness::Infinite,
                None => Finiteness::Unknown,
            },
            known => known,
        }
    }

    fn finiteness_structural(&self) -> Finiteness {
        if let Some((p, hits)) = self.periodic_profile() {
            return if hits.is_zero() {
                Finiteness::Finite(p.threshold)
            } else {
                Finiteness::Infinite
            };
        }
        match self {
            IndexSet::Union(a, b) => a.finiteness().union(b.finiteness()),
            IndexSet::Inter(a, b) => inter_finiteness(a, b),
            IndexSet::Diff(a, b) => inter_finiteness(a, &IndexSet::compl((**b).clone())),
            IndexSet::Compl(a) => a.cofiniteness(),
            leaf => leaf.leaf_finiteness(),
        }
    }

    fn cofiniteness_structural(&self) -> Finiteness {
        if let Some((p, hits)) = self.periodic_profile() {
            return if hits == p.period {
                Finiteness::Finite(p.threshold)
            } else {
                Finiteness::Infinite
            };
        }
        match self {
            IndexSet::ArithProg { start, step } => {
                if step.is_one() {
                    Finiteness::Finite(start - 1u32)
                } else {
                    Finiteness::Infinite
                }
            }
            IndexSet::EnumThreshold(r) => {
                if r <= &BigRational::zero() {
                    Finiteness::Finite(BigUint::zero())
                } else {
                    Finiteness::Infinite
                }
            }
            // every other leaf has infinitely many gaps
            IndexSet::Finite(_)
            | IndexSet::Interval { .. }
            | IndexSet::FactorialPoints(_)
            | IndexSet::FactorialIntervals(_) => Finiteness::Infinite,
            IndexSet::Compl(a) => a.finiteness(),
            IndexSet::Union(a, b) => inter_finiteness(
                &IndexSet::compl((**a).clone()),
                &IndexSet::compl((**b).clone()),
            ),
            IndexSet::Inter(a, b) => a.cofiniteness().union(b.cofiniteness()),
            IndexSet::Diff(a, b) => a.cofiniteness().union(b.finiteness()),
        }
    }

    /// `Some(true)` when the set is provably empty, `Some(false)` when provably nonempty.
    pub fn is_empty(&self) -> Option<bool> {
        if self.is_syntactically_empty() {
            return Some(true);
        }
        match self {
            IndexSet::Inter(a, b) if a.disjoint_from(b) => return Some(true),
            IndexSet::Diff(a, b) if a.subset_of(b) => return Some(true),
            _ => {}
        }
        match self.finiteness() {
            Finiteness::Finite(bound) => Some(self.count(&bound).is_zero()),
            Finiteness::Infinite => Some(false),
            Finiteness::Unknown => None,
        }
    }

    /// Provable inclusion `self ⊆ other`. `false` means "not proved", not "disproved".
    pub fn subset_of(&self, other: &IndexSet) -> bool {
        use IndexSet::*;
        if self == other || other.is_naturals() || self.is_syntactically_empty() {
            return true;
        }
        if let Some(elems) = small_elements(self) {
            return elems.iter().all(|e| other.member(e));
        }
        if let (Some(pa), Some(pb)) = (self.periodic(), other.periodic()) {
            let period = pa.period.lcm(&pb.period);
            if period.bits() <= MAX_PERIOD_BITS {
                let end = pa.threshold.max(pb.threshold) + period;
                return IndexSet::diff(self.clone(), other.clone())
                    .count(&end)
                    .is_zero();
            }
        }
        let structural = match (self, other) {
            (FactorialPoints(a), FactorialPoints(b)) => a.subset_of(b),
            // each n! with n in an infinite SEQ is an endpoint of an alternating block
            (FactorialPoints(a), FactorialIntervals(FactorialFamily::Alternating(seq))) => {
                a.subset_of(seq) && seq.finiteness() == Finiteness::Infinite
            }
            (EnumThreshold(s), EnumThreshold(r)) => s >= r,
            (
                ArithProg {
                    start: a1,
                    step: d1,
                },
                ArithProg {
                    start: a2,
                    step: d2,
                },
            ) => a1 >= a2 && (d1 % d2).is_zero() && ((a1 - a2) % d2).is_zero(),
            (Interval { lo: l1, hi: h1 }, Interval { lo: l2, hi: h2 }) => l1 >= l2 && h1 <= h2,
            (Compl(a), Compl(b)) => b.subset_of(a),
            _ => false,
        };
        if structural {
            return true;
        }
        match other {
            Union(b1, b2) if self.subset_of(b1) || self.subset_of(b2) => return true,
            Inter(b1, b2) if self.subset_of(b1) && self.subset_of(b2) => return true,
            Diff(b1, x) if self.subset_of(b1) && self.disjoint_from(x) => return true,
            Compl(x) if !matches!(self, Compl(_)) && self.disjoint_from(x) => return true,
            _ => {}
        }
        match self {
            Union(a1, a2) => a1.subset_of(other) && a2.subset_of(other),
            Inter(a1, a2) => a1.subset_of(other) || a2.subset_of(other),
            Diff(a1, _) => a1.subset_of(other),
            _ => false,
        }
    }

    /// Provable disjointness. `false` means "not proved".
    pub fn disjoint_from(&self, other: &IndexSet) -> bool {
        self.disjoint_directed(other) || other.disjoint_directed(self)
    }

    fn disjoint_directed(&self, other: &IndexSet) -> bool {
        use IndexSet::*;
        if self.is_syntactically_empty() {
            return true;
        }
        if let Some(elems) = small_elements(self) {
            return !elems.iter().any(|e| other.member(e));
        }
        if let (Some(pa), Some(pb)) = (self.periodic(), other.periodic()) {
            let period = pa.period.lcm(&pb.period);
            if period.bits() <= MAX_PERIOD_BITS {
                let end = pa.threshold.max(pb.threshold) + period;
                return IndexSet::inter(self.clone(), other.clone())
                    .count(&end)
                    .is_zero();
            }
        }
        match (self, other) {
            (
                ArithProg {
                    start: a1,
                    step: d1,
                },
                ArithProg {
                    start: a2,
                    step: d2,
                },
            ) => crt_merge(a1, d1, a2, d2).is_none(),
            (Interval { lo: l1, hi: h1 }, Interval { lo: l2, hi: h2 }) => h1 < l2 || h2 < l1,
            (Compl(x), b) => b.subset_of(x),
            (Union(a1, a2), b) => a1.disjoint_from(b) && a2.disjoint_from(b),
            (Inter(a1, a2), b) => a1.disjoint_from(b) || a2.disjoint_from(b),
            (Diff(a1, x), b) => a1.disjoint_from(b) || b.subset_of(x),
            (FactorialPoints(a), FactorialPoints(b)) => a.disjoint_from(b),
            _ => false,
        }
    }

    /// Peels finite modifications (`A \ F`, `A ∪ F`, `A ∩ ℕ\F`, double complements) off the top
    /// of the expression, returning the core and a bound on the peeled elements.
    fn strip_finite_modifications(&self) -> (&IndexSet, BigUint) {
        let mut current = self;
        let mut bound = BigUint::zero();
        loop {
            let next = match current {
                IndexSet::Diff(a, f) => finite_bound(f).map(|b| (&**a, b)),
                IndexSet::Union(a, f) => finite_bound(f)
                    .map(|b| (&**a, b))
                    .or_else(|| finite_bound(a).map(|b| (&**f, b))),
                IndexSet::Inter(a, c) | IndexSet::Inter(c, a)
                    if matches!(**c, IndexSet::Compl(_)) =>
                {
                    let IndexSet::Compl(f) = &**c else {
                        unreachable!()
                    };
                    finite_bound(f).map(|b| (&**a, b))
                }
                IndexSet::Compl(inner) => match &**inner {
                    IndexSet::Compl(core) => Some((&**core, BigUint::zero())),
                    _ => None,
                },
                _ => None,
            };
            match next {
                Some((core, b)) => {
                    current = core;
                    bound = bound.max(b);
                }
                None => return (current, bound),
            }
        }
    }

    /// A bound past which `self` and `other` provably agree, if one can be derived.
    pub fn finite_symdiff_bound(&self, other: &IndexSet) -> Option<BigUint> {
        if self == other {
            return Some(BigUint::zero());
        }
        let (core_a, bound_a) = self.strip_finite_modifications();
        let (core_b, bound_b) = other.strip_finite_modifications();
        let peeled = bound_a.max(bound_b);
        if let Some(inner) = core_symdiff(core_a, core_b) {
            return Some(inner.max(peeled));
        }
        let sym = IndexSet::union(
            IndexSet::diff(self.clone(), other.clone()),
            IndexSet::diff(other.clone(), self.clone()),
        );
        match sym.finiteness() {
            Finiteness::Finite(b) => Some(b),
            _ => None,
        }
    }

    /// Decides whether `self Δ other` is finite: structurally when possible, otherwise
    /// by reporting what a scan up to `horizon` saw.
    pub fn sym_diff_finite(&self, other: &IndexSet, horizon: u64) -> SymDiffVerdict {
        if let Some(bound) = self.finite_symdiff_bound(other) {
            return SymDiffVerdict::Finite {
                bound: bound.to_string(),
            };
        }
        let sym = IndexSet::union(
            IndexSet::diff(self.clone(), other.clone()),
            IndexSet::diff(other.clone(), self.clone()),
        );
        match sym.finiteness() {
            Finiteness::Finite(bound) => SymDiffVerdict::Finite {
                bound: bound.to_string(),
            },
            Finiteness::Infinite => SymDiffVerdict::Infinite,
            Finiteness::Unknown => SymDiffVerdict::Undecided {
                last_seen: sym.elements_upto(horizon).last().copied(),
                horizon,
            },
        }
    }
}

fn finite_bound(set: &IndexSet) -> Option<BigUint> {
    match set.finiteness() {
        Finiteness::Finite(b) => Some(b),
        _ => None,
    }
}

fn core_symdiff(a: &IndexSet, b: &IndexSet) -> Option<BigUint> {
    use IndexSet::*;
    if a == b {
        return Some(BigUint::zero());
    }
    match (a, b) {
        (Compl(x), Compl(y)) => x.finite_symdiff_bound(y),
        (Union(x1, x2), Union(y1, y2))
        | (Inter(x1, x2), Inter(y1, y2))
        | (Diff(x1, x2), Diff(y1, y2)) => Some(
            x1.finite_symdiff_bound(y1)?
                .max(x2.finite_symdiff_bound(y2)?),
        ),
        (FactorialPoints(x), FactorialPoints(y)) => {
            let b = x.finite_symdiff_bound(y)?;
            (b <= BigUint::from(MAX_FACTORIAL_BOUND)).then(|| factorial(&b))
        }
        (FactorialIntervals(fx), FactorialIntervals(fy)) => family_symdiff(fx, fy),
        _ => None,
    }
}

/// Two patterned families over sequences that agree beyond `B` coincide past the
/// second shared element's factorial, provided the number of dropped indices is even.
fn family_symdiff(fx: &FactorialFamily, fy: &FactorialFamily) -> Option<BigUint> {
    let same_kind = matches!(
        (fx, fy),
        (
            FactorialFamily::Alternating(_),
            FactorialFamily::Alternating(_)
        ) | (FactorialFamily::Cover(_), FactorialFamily::Cover(_))
    );
    if !same_kind {
        return None;
    }
    let (sx, sy) = (fx.sequence()?, fy.sequence()?);
    let bound = sx.finite_symdiff_bound(sy)?;
    let (cx, cy) = (sx.count(&bound), sy.count(&bound));
    let parity_x = (&cx % 2u32).is_zero();
    let parity_y = (&cy % 2u32).is_zero();
    if parity_x != parity_y {
        return None;
    }
    let first = sx.next_after(&bound)?;
    let second = sx.next_after(&first)?;
    (second <= BigUint::from(MAX_FACTORIAL_BOUND)).then(|| factorial(&second))
}

/// `factorials(B) ∩ P` for eventually periodic `P`: once `n ≥` the period, `n!` sits
/// in the zero residue class, so the intersection is finite or eventually all of `A`.
fn factorial_residue_finiteness(a: &IndexSet, p: &IndexSet) -> Option<Finiteness> {
    if !matches!(a, IndexSet::FactorialPoints(_)) {
        return None;
    }
    let pp = p.periodic()?;
    if pp.period > BigUint::from(MAX_FACTORIAL_BOUND) {
        return None;
    }
    let probe = (&pp.threshold / &pp.period + 1u32) * &pp.period;
    if p.member(&probe) {
        return (a.finiteness() == Finiteness::Infinite).then_some(Finiteness::Infinite);
    }
    let below = factorial(&(&pp.period - 1u32));
    Some(Finiteness::Finite(pp.threshold.max(below)))
}

fn inter_finiteness(a: &IndexSet, b: &IndexSet) -> Finiteness {
    let (fa, fb) = (a.finiteness(), b.finiteness());
    match (&fa, &fb) {
        (Finiteness::Finite(x), Finiteness::Finite(y)) => {
            return Finiteness::Finite(x.min(y).clone())
        }
        (Finiteness::Finite(x), _) | (_, Finiteness::Finite(x)) => {
            return Finiteness::Finite(x.clone())
        }
        _ => {}
    }
    if a.disjoint_from(b) {
        return Finiteness::Finite(BigUint::zero());
    }
    // A ∩ ℕ\(B1 \ C) = (A \ B1) ∪ (A ∩ C): finite when A ⊆ B1 and A ∩ C is finite
    for (x, y) in [(a, b), (b, a)] {
        if let IndexSet::Compl(inner) = y {
            if let IndexSet::Diff(b1, c) = &**inner {
                if x.subset_of(b1) {
                    if let Finiteness::Finite(bound) = inter_finiteness(x, c) {
                        return Finiteness::Finite(bound);
                    }
                }
            }
        }
    }
    for (x, y) in [(a, b), (b, a)] {
        if let Some(f) = factorial_residue_finiteness(x, y) {
            return f;
        }
    }
    if (fa == Finiteness::Infinite && b.cofiniteness().is_finite() == Some(true))
        || (fb == Finiteness::Infinite && a.cofiniteness().is_finite() == Some(true))
    {
        return Finiteness::Infinite;
    }
    let density = IndexSet::inter(a.clone(), b.clone()).density_bounds();
    if density.upper.lo > BigRational::zero() {
        return Finiteness::Infinite;
    }
    Finiteness::Unknown
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn crt_examples() {
        // odds ∩ multiples of 3 = 3, 9, 15, ...
        assert_eq!(crt_merge(&b(1), &b(2), &b(3), &b(3)), Some((b(3), b(6))));
        assert_eq!(crt_merge(&b(1), &b(2), &b(2), &b(2)), None);
        assert_eq!(crt_merge(&b(10), &b(4), &b(4), &b(6)), Some((b(10), b(12))));
        assert_eq!(crt_merge(&b(10), &b(4), &b(3), &b(6)), None);
        // brute-force check on a grid
        for a1 in 1..8u64 {
            for d1 in 1..7u64 {
                for a2 in 1..8u64 {
                    for d2 in 1..7u64 {
                        let brute: Vec<u64> = (1..200)
                            .filter(|t| {
                                *t >= a1 && (t - a1) % d1 == 0 && *t >= a2 && (t - a2) % d2 == 0
                            })
                            .collect();
                        match crt_merge(&b(a1), &b(d1), &b(a2), &b(d2)) {
                            None => assert!(brute.is_empty()),
                            Some((s, d)) => {
                                let s = s.to_u64().unwrap();
                                let d = d.to_u64().unwrap();
                                let merged: Vec<u64> =
                                    (1..200).filter(|t| *t >= s && (t - s) % d == 0).collect();
                                assert_eq!(merged, brute, "{a1},{d1} vs {a2},{d2}");
                            }
                        }
                    }
                }
            }
        }
    }
}
