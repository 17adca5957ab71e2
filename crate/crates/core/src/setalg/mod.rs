//! Symbolic subsets of the naturals `{1, 2, 3, ...}` with exact structural counting.
//!
//! An [`IndexSet`] is an expression tree over a handful of primitive families
//! (finite lists, progressions, intervals, factorial points, factorial interval
//! families and enumeration thresholds) closed under the boolean operations.
//! Trees are never simplified behind the caller's back: counting and membership
//! walk the tree as written.

mod analysis;
mod density;
mod dsl;
mod eventual;
mod factexpr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use analysis::{Finiteness, SymDiffVerdict};
pub use density::{
    checkpoint_schedule, Checkpoint, DensityBound, DensityResult, DEFAULT_CHECKPOINT_K,
};
pub(crate) use dsl::Cursor;
pub use dsl::ParseError;
pub use factexpr::{EvalError, FactExpr};

use crate::num::{factorial, factorial_floor, factorial_inverse};
use crate::sternbrocot;

/// Ceiling used by searches over sets whose finiteness cannot be decided.
const SEARCH_LIMIT_BITS: u64 = 4096;

/// Longest prefix swept when counting an eventually periodic set.
const PERIOD_SWEEP_LIMIT: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexSet {
    /// Strictly increasing list of naturals.
    Finite(Vec<BigUint>),
    /// `{start, start + step, start + 2 step, ...}`.
    ArithProg {
        start: BigUint,
        step: BigUint,
    },
    /// Integer interval `[lo, hi]`, both ends included.
    Interval {
        lo: BigUint,
        hi: BigUint,
    },
    /// `{k! : k in base}`.
    FactorialPoints(Box<IndexSet>),
    FactorialIntervals(FactorialFamily),
    /// `{k : q_k >= threshold}` for the Stern–Brocot enumeration `q_1, q_2, ...` of `(0, 1)`.
    EnumThreshold(BigRational),
    Union(Box<IndexSet>, Box<IndexSet>),
    Inter(Box<IndexSet>, Box<IndexSet>),
    Compl(Box<IndexSet>),
    Diff(Box<IndexSet>, Box<IndexSet>),
}

/// Unions of integer intervals with factorial endpoints.
///
/// The two patterned families take an index sequence `n_1 < n_2 < ...`, given as the
/// increasing enumeration of an [`IndexSet`]:
/// * `Alternating`: blocks `[(n_{2k-1})!, (n_{2k})!]`.
/// * `Cover`: blocks `((n_{2k-1})!, (n_{2k+1})! - (n_{2k+1})!/(n_{2k})!]`, whose union has
///   density one when the sequence is infinite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactorialFamily {
    Explicit(Vec<FactBlock>),
    Alternating(Box<IndexSet>),
    Cover(Box<IndexSet>),
}

/// Closed block `[lo, hi]` with symbolic bounds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactBlock {
    lo: FactExpr,
    hi: FactExpr,
    lo_value: BigUint,
    hi_value: BigUint,
}

impl FactBlock {
    pub fn new(lo: FactExpr, hi: FactExpr) -> Result<Self, SetError> {
        let lo_value = lo.eval()?;
        let hi_value = hi.eval()?;
        if lo_value.is_zero() || lo_value >= hi_value {
            return Err(SetError::Invalid(format!(
                "block ({lo}, {hi}) must satisfy 1 <= lo < hi"
            )));
        }
        Ok(FactBlock {
            lo,
            hi,
            lo_value,
            hi_value,
        })
    }

    pub fn lo(&self) -> &FactExpr {
        &self.lo
    }

    pub fn hi(&self) -> &FactExpr {
        &self.hi
    }

    pub fn bounds(&self) -> (&BigUint, &BigUint) {
        (&self.lo_value, &self.hi_value)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("invalid set: {0}")]
    Invalid(String),
    #[error(transparent)]
    Bound(#[from] EvalError),
    #[error("set has only {available} elements, asked for element {requested}")]
    TooFewElements {
        available: BigUint,
        requested: BigUint,
    },
    #[error("could not locate element {0} within the search limit")]
    SearchLimit(BigUint),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

fn nat(n: u64) -> BigUint {
    BigUint::from(n)
}

impl IndexSet {
    pub fn naturals() -> Self {
        IndexSet::ArithProg {
            start: BigUint::one(),
            step: BigUint::one(),
        }
    }

    pub fn empty() -> Self {
        IndexSet::Finite(Vec::new())
    }

    pub fn finite<I, T>(elems: I) -> Result<Self, SetError>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigUint>,
    {
        let elems: Vec<BigUint> = elems.into_iter().map(Into::into).collect();
        if elems.iter().any(Zero::is_zero) {
            return Err(SetError::Invalid("finite sets hold naturals >= 1".into()));
        }
        if elems.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SetError::Invalid(
                "finite set must be strictly increasing".into(),
            ));
        }
        Ok(IndexSet::Finite(elems))
    }

    /// Sorts and deduplicates before building a finite set.
    pub fn finite_from_unsorted<I, T>(elems: I) -> Result<Self, SetError>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigUint>,
    {
        let mut elems: Vec<BigUint> = elems.into_iter().map(Into::into).collect();
        elems.sort();
        elems.dedup();
        Self::finite(elems)
    }

    pub fn arith_prog(
        start: impl Into<BigUint>,
        step: impl Into<BigUint>,
    ) -> Result<Self, SetError> {
        let (start, step) = (start.into(), step.into());
        if start.is_zero() || step.is_zero() {
            return Err(SetError::Invalid(format!(
                "ap({start},{step}) needs start >= 1 and step >= 1"
            )));
        }
        Ok(IndexSet::ArithProg { start, step })
    }

    pub fn interval(lo: impl Into<BigUint>, hi: impl Into<BigUint>) -> Result<Self, SetError> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo.is_zero() || lo > hi {
            return Err(SetError::Invalid(format!(
                "interval({lo},{hi}) needs 1 <= lo <= hi"
            )));
        }
        Ok(IndexSet::Interval { lo, hi })
    }

    /// `[1, n]`, or the empty set when `n == 0`.
    pub fn initial_segment(n: &BigUint) -> Self {
        if n.is_zero() {
            IndexSet::empty()
        } else {
            IndexSet::Interval {
                lo: BigUint::one(),
                hi: n.clone(),
            }
        }
    }

    pub fn factorial_points(base: IndexSet) -> Self {
        IndexSet::FactorialPoints(Box::new(base))
    }

    pub fn factorial_blocks(blocks: Vec<FactBlock>) -> Result<Self, SetError> {
        if blocks.windows(2).any(|w| w[0].hi_value >= w[1].lo_value) {
            return Err(SetError::Invalid(
                "factorial blocks must be disjoint and increasing".into(),
            ));
        }
        Ok(IndexSet::FactorialIntervals(FactorialFamily::Explicit(
            blocks,
        )))
    }

    pub fn alternating_blocks(seq: IndexSet) -> Self {
        IndexSet::FactorialIntervals(FactorialFamily::Alternating(Box::new(seq)))
    }

    pub fn cover_blocks(seq: IndexSet) -> Self {
        IndexSet::FactorialIntervals(FactorialFamily::Cover(Box::new(seq)))
    }

    pub fn enum_threshold(threshold: BigRational) -> Self {
        IndexSet::EnumThreshold(threshold)
    }

    pub fn union(a: IndexSet, b: IndexSet) -> Self {
        IndexSet::Union(Box::new(a), Box::new(b))
    }

    pub fn inter(a: IndexSet, b: IndexSet) -> Self {
        IndexSet::Inter(Box::new(a), Box::new(b))
    }

    pub fn compl(a: IndexSet) -> Self {
        IndexSet::Compl(Box::new(a))
    }

    pub fn diff(a: IndexSet, b: IndexSet) -> Self {
        IndexSet::Diff(Box::new(a), Box::new(b))
    }

    /// Left-nested union of several sets; the empty list yields the empty set.
    pub fn union_all(sets: impl IntoIterator<Item = IndexSet>) -> Self {
        let mut iter = sets.into_iter();
        match iter.next() {
            None => IndexSet::empty(),
            Some(first) => iter.fold(first, IndexSet::union),
        }
    }

    /// Compact representation of an explicit sorted list: runs become intervals.
    pub fn from_sorted_runs(elems: &[u64]) -> Self {
        let mut pieces = Vec::new();
        let mut singles = Vec::new();
        let mut i = 0;
        while i < elems.len() {
            let mut j = i;
            while j + 1 < elems.len() && elems[j + 1] == elems[j] + 1 {
                j += 1;
            }
            if j - i >= 2 {
                pieces.push(IndexSet::Interval {
                    lo: nat(elems[i]),
                    hi: nat(elems[j]),
                });
            } else {
                singles.extend(elems[i..=j].iter().map(|&t| nat(t)));
            }
            i = j + 1;
        }
        if !singles.is_empty() || pieces.is_empty() {
            pieces.insert(0, IndexSet::Finite(singles));
        }
        IndexSet::union_all(pieces)
    }

    pub fn is_naturals(&self) -> bool {
        matches!(self, IndexSet::ArithProg { start, step } if start.is_one() && step.is_one())
    }

    pub fn is_syntactically_empty(&self) -> bool {
        matches!(self, IndexSet::Finite(v) if v.is_empty())
    }

    /// `|S ∩ [1, n]|`, computed from the structure of the expression.
    pub fn count(&self, n: &BigUint) -> BigUint {
        if n.is_zero() {
            return BigUint::zero();
        }
        match self {
            IndexSet::Finite(elems) => nat(elems.partition_point(|e| e <= n) as u64),
            IndexSet::ArithProg { start, step } => {
                if n < start {
                    BigUint::zero()
                } else {
                    (n - start) / step + 1u32
                }
            }
            IndexSet::Interval { lo, hi } => {
                if n < lo {
                    BigUint::zero()
                } else {
                    n.min(hi) - lo + 1u32
                }
            }
            IndexSet::FactorialPoints(base) => match factorial_floor(n) {
                Some(k) => base.count(&k),
                None => BigUint::zero(),
            },
            IndexSet::FactorialIntervals(family) => family
                .blocks_upto(n)
                .iter()
                .map(|(lo, hi)| n.min(hi) - lo + 1u32)
                .sum(),
            IndexSet::EnumThreshold(r) => sternbrocot::count_at_least(r, n),
            IndexSet::Union(..)
            | IndexSet::Inter(..)
            | IndexSet::Diff(..)
            | IndexSet::Compl(..)
                if self.depth() > 2 =>
            {
                match self.count_by_period(n) {
                    Some(c) => c,
                    None => self.count_boolean(n),
                }
            }
            _ => self.count_boolean(n),
        }
    }

    /// Union, intersection, difference or complement.
    pub(crate) fn is_boolean_node(&self) -> bool {
        matches!(
            self,
            IndexSet::Union(..) | IndexSet::Inter(..) | IndexSet::Diff(..) | IndexSet::Compl(_)
        )
    }

    fn depth(&self) -> usize {
        match self {
            IndexSet::Union(a, b) | IndexSet::Inter(a, b) | IndexSet::Diff(a, b) => {
                1 + a.depth().max(b.depth())
            }
            IndexSet::Compl(a) => 1 + a.depth(),
            _ => 0,
        }
    }

    /// Counting through one period of an eventually periodic set: inclusion–exclusion on
    /// deep trees repeats work exponentially, a membership sweep of one period does not.
    fn count_by_period(&self, n: &BigUint) -> Option<BigUint> {
        let p = self.periodic()?;
        let span = (&p.threshold + &p.period)
            .to_usize()
            .filter(|&s| s <= PERIOD_SWEEP_LIMIT)?;
        let mask = self.mask(span);
        let upto = |m: usize| nat(mask[1..=m].iter().filter(|b| **b).count() as u64);
        if n <= &nat(span as u64) {
            return Some(upto(n.to_usize().expect("at most span")));
        }
        let t = p.threshold.to_usize().expect("below span");
        let per = upto(span) - upto(t);
        let past = n - &p.threshold;
        let (full, rest) = (
            &past / &p.period,
            (&past % &p.period).to_usize().expect("below period"),
        );
        Some(upto(t) + full * per + upto(t + rest) - upto(t))
    }

    fn count_boolean(&self, n: &BigUint) -> BigUint {
        match self {
            IndexSet::Union(a, b) => a.count(n) + b.count(n) - a.count_inter(b, n),
            IndexSet::Inter(a, b) => a.count_inter(b, n),
            IndexSet::Compl(a) => n - a.count(n),
            IndexSet::Diff(a, b) => self.count_diff(a, b, n),
            _ => unreachable!("leaves are counted directly"),
        }
    }

    /// `|A \ B ∩ [1, n]|` = `|A| - |A ∩ B|`.
    fn count_diff(&self, a: &IndexSet, b: &IndexSet, n: &BigUint) -> BigUint {
        a.count(n) - a.count_inter(b, n)
    }

    /// `|A ∩ B ∩ [1, n]|` by structural cases.
    ///
    /// Boolean nodes are peeled first (each step removes a complement, union or
    /// difference), then a sparse primitive side is enumerated, and chains of
    /// progressions and enumeration thresholds are merged directly.
    fn count_inter(&self, other: &IndexSet, n: &BigUint) -> BigUint {
        use IndexSet::*;
        match (self, other) {
            (Compl(a), b) | (b, Compl(a)) => b.count(n) - b.count_inter(a, n),
            (Union(a1, a2), b) | (b, Union(a1, a2)) => {
                // |(A1 ∪ A2) ∩ B| = |A1 ∩ B| + |A2 ∩ B| - |A1 ∩ A2 ∩ B|
                let both = IndexSet::inter((**a1).clone(), (**a2).clone());
                a1.count_inter(b, n) + a2.count_inter(b, n) - both.count_inter(b, n)
            }
            (Diff(a1, a2), b) | (b, Diff(a1, a2)) => {
                let inner = IndexSet::inter((**a1).clone(), b.clone());
                a1.count_inter(b, n) - inner.count_inter(a2, n)
            }
            (Interval { lo, hi }, b) | (b, Interval { lo, hi }) => {
                let top = n.min(hi);
                if top < lo {
                    BigUint::zero()
                } else {
                    b.count(top) - b.count(&(lo - 1u32))
                }
            }
            (Finite(elems), b) | (b, Finite(elems)) => nat(elems
                .iter()
                .take_while(|e| *e <= n)
                .filter(|e| b.member(e))
                .count() as u64),
            (FactorialPoints(base), b) | (b, FactorialPoints(base)) => {
                let Some(top) = factorial_floor(n) else {
                    return BigUint::zero();
                };
                let mut total = BigUint::zero();
                for k in Self::elements_upto_iter(base, &top) {
                    if b.member(&factorial(&k)) {
                        total += 1u32;
                    }
                }
                total
            }
            (FactorialIntervals(family), b) | (b, FactorialIntervals(family)) => family
                .blocks_upto(n)
                .iter()
                .map(|(lo, hi)| {
                    let top = n.min(hi);
                    b.count(top) - b.count(&(lo - 1u32))
                })
                .sum(),
            _ => {
                let mut leaves = Vec::new();
                self.flatten_inter(&mut leaves);
                other.flatten_inter(&mut leaves);
                if let Some(pos) = leaves
                    .iter()
                    .position(|l| !matches!(l, ArithProg { .. } | EnumThreshold(_)))
                {
                    let head = leaves.remove(pos);
                    let rest = leaves.into_iter().cloned().reduce(IndexSet::inter);
                    return match rest {
                        Some(rest) => head.count_inter(&rest, n),
                        None => head.count(n),
                    };
                }
                Self::count_progressions_and_thresholds(&leaves, n)
            }
        }
    }

    fn flatten_inter<'a>(&'a self, out: &mut Vec<&'a IndexSet>) {
        match self {
            IndexSet::Inter(a, b) => {
                a.flatten_inter(out);
                b.flatten_inter(out);
            }
            other => out.push(other),
        }
    }

    fn count_progressions_and_thresholds(leaves: &[&IndexSet], n: &BigUint) -> BigUint {
        let mut prog = IndexSet::naturals();
        let mut threshold: Option<BigRational> = None;
        for leaf in leaves {
            match leaf {
                IndexSet::ArithProg { start, step } => {
                    let IndexSet::ArithProg {
                        start: s0,
                        step: d0,
                    } = &prog
                    else {
                        unreachable!()
                    };
                    match analysis::crt_merge(s0, d0, start, step) {
                        Some((start, step)) => prog = IndexSet::ArithProg { start, step },
                        None => return BigUint::zero(),
                    }
                }
                IndexSet::EnumThreshold(r) => {
                    threshold = Some(match threshold {
                        Some(t) if t >= *r => t,
                        _ => r.clone(),
                    });
                }
                _ => unreachable!("only progressions and thresholds reach here"),
            }
        }
        match threshold {
            None => prog.count(n),
            Some(r) => {
                let thr = IndexSet::EnumThreshold(r);
                if prog.is_naturals() {
                    thr.count(n)
                } else {
                    prog.count_inter_by_scan(&thr, n)
                }
            }
        }
    }

    fn count_inter_by_scan(&self, other: &IndexSet, n: &BigUint) -> BigUint {
        let mut total = BigUint::zero();
        for t in Self::elements_upto_iter(self, n) {
            if other.member(&t) {
                total += 1u32;
            }
        }
        total
    }

    /// Elements of `set` that are `<= n`, in increasing order.
    fn elements_upto_iter<'a>(
        set: &'a IndexSet,
        n: &'a BigUint,
    ) -> impl Iterator<Item = BigUint> + 'a {
        let mut cursor = BigUint::zero();
        std::iter::from_fn(move || {
            let next = set.next_after(&cursor)?;
            if &next > n {
                return None;
            }
            cursor = next.clone();
            Some(next)
        })
    }

    pub fn member(&self, t: &BigUint) -> bool {
        if t.is_zero() {
            return false;
        }
        match self {
            IndexSet::Finite(elems) => elems.binary_search(t).is_ok(),
            IndexSet::ArithProg { start, step } => t >= start && ((t - start) % step).is_zero(),
            IndexSet::Interval { lo, hi } => t >= lo && t <= hi,
            IndexSet::FactorialPoints(base) => {
                factorial_inverse(t).is_some_and(|k| base.member(&k))
            }
            IndexSet::FactorialIntervals(family) => family
                .blocks_upto(t)
                .iter()
                .any(|(lo, hi)| t >= lo && t <= hi),
            IndexSet::EnumThreshold(r) => &sternbrocot::nth_rational(t) >= r,
            IndexSet::Union(a, b) => a.member(t) || b.member(t),
            IndexSet::Inter(a, b) => a.member(t) && b.member(t),
            IndexSet::Compl(a) => !a.member(t),
            IndexSet::Diff(a, b) => a.member(t) && !b.member(t),
        }
    }

    pub fn contains(&self, t: u64) -> bool {
        self.member(&nat(t))
    }

    /// Membership of every `t` in `1..=n`; index 0 is always `false`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut out = vec![false; n + 1];
        match self {
            IndexSet::Finite(elems) => {
                for e in elems {
                    match e.to_usize() {
                        Some(i) if i <= n => out[i] = true,
                        _ => break,
                    }
                }
            }
            IndexSet::ArithProg { start, step } => {
                if let (Some(a), Some(d)) = (start.to_usize(), step.to_usize()) {
                    let mut t = a;
                    while t <= n {
                        out[t] = true;
                        t += d;
                    }
                }
            }
            IndexSet::Interval { lo, hi } => {
                if let Some(lo) = lo.to_usize() {
                    let hi = hi.to_usize().unwrap_or(usize::MAX).min(n);
                    for slot in out.iter_mut().take(hi + 1).skip(lo) {
                        *slot = true;
                    }
                }
            }
            IndexSet::FactorialPoints(base) => {
                let mut k = 1u64;
                loop {
                    let f = factorial(&nat(k));
                    match f.to_usize() {
                        Some(i) if i <= n => {
                            if base.member(&nat(k)) {
                                out[i] = true;
                            }
                        }
                        _ => break,
                    }
                    k += 1;
                }
            }
            IndexSet::FactorialIntervals(family) => {
                for (lo, hi) in family.blocks_upto(&nat(n as u64)) {
                    let lo = lo.to_usize().unwrap_or(usize::MAX);
                    let hi = hi.to_usize().unwrap_or(usize::MAX).min(n);
                    for slot in out.iter_mut().take(hi + 1).skip(lo) {
                        *slot = true;
                    }
                }
            }
            IndexSet::EnumThreshold(r) => {
                // values increase along a level, so members of level d are a suffix of it
                let mut depth = 1u64;
                while (1usize << (depth - 1)) <= n {
                    let start = 1usize << (depth - 1);
                    let below = sternbrocot::level_count_below(depth, r)
                        .to_usize()
                        .expect("level size fits");
                    let end = ((1usize << depth) - 1).min(n);
                    for slot in out.iter_mut().take(end + 1).skip(start + below) {
                        *slot = true;
                    }
                    depth += 1;
                }
            }
            IndexSet::Union(a, b) => {
                let (ma, mb) = (a.mask(n), b.mask(n));
                for i in 1..=n {
                    out[i] = ma[i] || mb[i];
                }
            }
            IndexSet::Inter(a, b) => {
                let (ma, mb) = (a.mask(n), b.mask(n));
                for i in 1..=n {
                    out[i] = ma[i] && mb[i];
                }
            }
            IndexSet::Compl(a) => {
                let ma = a.mask(n);
                for i in 1..=n {
                    out[i] = !ma[i];
                }
            }
            IndexSet::Diff(a, b) => {
                let (ma, mb) = (a.mask(n), b.mask(n));
                for i in 1..=n {
                    out[i] = ma[i] && !mb[i];
                }
            }
        }
        out
    }

    /// Elements of the set in `1..=n`, increasing.
    pub fn elements_upto(&self, n: u64) -> Vec<u64> {
        let mask = self.mask(n as usize);
        (1..=n).filter(|&t| mask[t as usize]).collect()
    }

    /// Smallest element strictly greater than `t`.
    pub fn next_after(&self, t: &BigUint) -> Option<BigUint> {
        match self {
            IndexSet::Finite(elems) => {
                let idx = elems.partition_point(|e| e <= t);
                elems.get(idx).cloned()
            }
            IndexSet::ArithProg { start, step } => {
                if t < start {
                    Some(start.clone())
                } else {
                    let k = (t - start) / step + 1u32;
                    Some(start + k * step)
                }
            }
            IndexSet::Interval { lo, hi } => {
                if t < lo {
                    Some(lo.clone())
                } else if t < hi {
                    Some(t + 1u32)
                } else {
                    None
                }
            }
            _ => {
                let m = self.count(t) + 1u32;
                self.nth_element(&m).ok()
            }
        }
    }

    /// The `m`-th smallest element (1-indexed).
    pub fn nth_element(&self, m: &BigUint) -> Result<BigUint, SetError> {
        if m.is_zero() {
            return Err(SetError::Invalid("element index is 1-based".into()));
        }
        match self {
            IndexSet::Finite(elems) => {
                return m
                    .to_usize()
                    .and_then(|i| elems.get(i - 1))
                    .cloned()
                    .ok_or_else(|| SetError::TooFewElements {
                        available: nat(elems.len() as u64),
                        requested: m.clone(),
                    });
            }
            IndexSet::ArithProg { start, step } => return Ok(start + (m - 1u32) * step),
            IndexSet::Interval { lo, hi } => {
                let available = hi - lo + 1u32;
                if m > &available {
                    return Err(SetError::TooFewElements {
                        available,
                        requested: m.clone(),
                    });
                }
                return Ok(lo + m - 1u32);
            }
            _ => {}
        }
        let finite_bound = match self.finiteness() {
            Finiteness::Finite(bound) => Some(bound),
            _ => None,
        };
        if let Some(bound) = &finite_bound {
            let available = self.count(bound);
            if m > &available {
                return Err(SetError::TooFewElements {
                    available,
                    requested: m.clone(),
                });
            }
        }
        // exponential search for an upper bracket, then bisection on the count
        let mut hi = m.clone();
        loop {
            if &self.count(&hi) >= m {
                break;
            }
            if let Some(bound) = &finite_bound {
                if &hi >= bound {
                    hi = bound.clone();
                    break;
                }
            }
            if hi.bits() > SEARCH_LIMIT_BITS {
                return Err(SetError::SearchLimit(m.clone()));
            }
            hi <<= 1u32;
        }
        let mut lo = BigUint::one();
        while lo < hi {
            let mid = (&lo + &hi) >> 1u32;
            if &self.count(&mid) >= m {
                hi = mid;
            } else {
                lo = mid + 1u32;
            }
        }
        Ok(lo)
    }

    pub fn nth(&self, m: u64) -> Result<BigUint, SetError> {
        self.nth_element(&nat(m))
    }
}

impl FactorialFamily {
    /// Closed integer intervals of the family whose lower end is `<= n`, increasing.
    pub fn blocks_upto(&self, n: &BigUint) -> Vec<(BigUint, BigUint)> {
        match self {
            FactorialFamily::Explicit(blocks) => blocks
                .iter()
                .take_while(|b| &b.lo_value <= n)
                .map(|b| (b.lo_value.clone(), b.hi_value.clone()))
                .collect(),
            FactorialFamily::Alternating(seq) => {
                let mut out = Vec::new();
                let mut cursor = BigUint::zero();
                loop {
                    let Some(a) = seq.next_after(&cursor) else {
                        break;
                    };
                    let lo = factorial(&a);
                    if &lo > n {
                        break;
                    }
                    let Some(b) = seq.next_after(&a) else { break };
                    out.push((lo, factorial(&b)));
                    cursor = b;
                }
                out
            }
            FactorialFamily::Cover(seq) => {
                let mut out = Vec::new();
                let Some(mut first) = seq.next_after(&BigUint::zero()) else {
                    return out;
                };
                loop {
                    let lo_open = factorial(&first);
                    if &lo_open >= n {
                        break;
                    }
                    let Some(mid) = seq.next_after(&first) else {
                        break;
                    };
                    let Some(last) = seq.next_after(&mid) else {
                        break;
                    };
                    let top = factorial(&last);
                    let hi = &top - &top / factorial(&mid);
                    if hi > lo_open {
                        out.push((lo_open + 1u32, hi));
                    }
                    first = last;
                }
                out
            }
        }
    }

    /// Index sequence of a patterned family.
    pub fn sequence(&self) -> Option<&IndexSet> {
        match self {
            FactorialFamily::Explicit(_) => None,
            FactorialFamily::Alternating(seq) | FactorialFamily::Cover(seq) => Some(seq),
        }
    }
}

#[cfg(test)]
mod tests;
