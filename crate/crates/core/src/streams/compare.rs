//! Structural pointwise comparison of two streams.
//!
//! Each stream is cut into cells, a region of coordinates together with a value
//! rule: a constant, or `|C ∩ [1, t]| + offset` for a rank-fill complement `C`. For
//! every pair of overlapping cells the sign of `x_t − y_t` is shown to be constant past
//! some threshold. Coordinates up to the largest threshold are compared exactly by
//! evaluation, and the rest of each region contributes symbolically. The outcome is an
//! exact partition of ℕ into the sets where `x > y`, `x = y` and `x < y`.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::Stream;
use crate::num::floor_rational;
use crate::setalg::{Finiteness, IndexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellValue {
    Const(BigRational),
    /// `|set ∩ [1, t]| + offset`.
    Rank {
        set: IndexSet,
        offset: BigInt,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub region: IndexSet,
    pub value: CellValue,
}

/// Exact partition of the coordinates by the sign of `x_t − y_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub gt: IndexSet,
    pub eq: IndexSet,
    pub lt: IndexSet,
    /// Coordinates up to this point were compared by evaluation.
    pub threshold: u64,
    /// Overlap regions with the sign of `x_t − y_t` past `threshold`. On each region the
    /// difference is constant or nondecreasing there.
    pub tails: Vec<(IndexSet, Ordering)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Unresolved {
    /// Two rank cells whose difference has no provable eventual sign.
    Cells { left: String, right: String },
    /// The sign stabilizes only past a point beyond the horizon.
    ThresholdBeyondHorizon { threshold: String, horizon: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrictSet {
    Exact(IndexSet),
    /// First strict coordinates seen in a scan of `[1, horizon]`.
    Undecided {
        horizon: u64,
        witnesses: Vec<u64>,
    },
}

/// Coordinates in `[1, horizon]` where the two streams differ, by direction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scan {
    pub horizon: u64,
    pub gt: Vec<u64>,
    pub lt: Vec<u64>,
}

impl Scan {
    pub fn run(x: &Stream, y: &Stream, horizon: u64) -> Scan {
        let (px, py) = (x.prefix(horizon), y.prefix(horizon));
        let mut scan = Scan {
            horizon,
            ..Scan::default()
        };
        for (i, (a, b)) in px.iter().zip(&py).enumerate() {
            match a.cmp(b) {
                Ordering::Greater => scan.gt.push(i as u64 + 1),
                Ordering::Less => scan.lt.push(i as u64 + 1),
                Ordering::Equal => {}
            }
        }
        scan
    }
}

pub(crate) fn permutation_bound(x: &Stream) -> u64 {
    match x {
        Stream::Permuted { base, perm } => perm.bound().max(permutation_bound(base)),
        _ => 0,
    }
}

/// `a \ b` with complements folded away where that is immediate.
pub(crate) fn set_minus(a: &IndexSet, b: &IndexSet) -> IndexSet {
    match (a, b) {
        (IndexSet::Compl(x), IndexSet::Compl(y)) => IndexSet::diff((**y).clone(), (**x).clone()),
        (_, IndexSet::Compl(y)) => IndexSet::inter(a.clone(), (**y).clone()),
        _ => IndexSet::diff(a.clone(), b.clone()),
    }
}

fn meet(a: &IndexSet, b: &IndexSet) -> IndexSet {
    if a == b || b.is_naturals() {
        a.clone()
    } else if a.is_naturals() {
        b.clone()
    } else {
        IndexSet::inter(a.clone(), b.clone())
    }
}

impl Stream {
    /// Regions with their value rules; the regions partition ℕ beyond
    /// [`permutation_bound`].
    pub fn cells(&self) -> Vec<Cell> {
        match self {
            Stream::Piecewise { default, clauses } => {
                let mut out = Vec::new();
                let mut earlier: Vec<IndexSet> = Vec::new();
                for (set, value) in clauses {
                    let region = if earlier.iter().all(|e| e.disjoint_from(set)) {
                        set.clone()
                    } else {
                        IndexSet::diff(set.clone(), IndexSet::union_all(earlier.clone()))
                    };
                    out.push(Cell {
                        region,
                        value: CellValue::Const(value.clone()),
                    });
                    earlier.push(set.clone());
                }
                let rest = if earlier.is_empty() {
                    IndexSet::naturals()
                } else {
                    IndexSet::compl(IndexSet::union_all(earlier))
                };
                out.push(Cell {
                    region: rest,
                    value: CellValue::Const(default.clone()),
                });
                out
            }
            Stream::RankFill {
                fill_set,
                fill_value,
            } => {
                let gaps = IndexSet::compl(fill_set.clone());
                vec![
                    Cell {
                        region: fill_set.clone(),
                        value: CellValue::Const(fill_value.clone()),
                    },
                    Cell {
                        region: gaps.clone(),
                        value: CellValue::Rank {
                            set: gaps,
                            offset: BigInt::from(1),
                        },
                    },
                ]
            }
            Stream::Permuted { base, .. } => base.cells(),
        }
    }
}

/// Sign of `x_t − y_t` for every `t` past the returned point, if it can be shown.
fn eventual_sign(x: &CellValue, y: &CellValue) -> Option<(Ordering, BigUint)> {
    match (x, y) {
        (CellValue::Const(a), CellValue::Const(b)) => Some((a.cmp(b), BigUint::zero())),
        (CellValue::Rank { set, offset }, CellValue::Const(b)) => rank_above(set, offset, b),
        (CellValue::Const(a), CellValue::Rank { set, offset }) => {
            rank_above(set, offset, a).map(|(s, m)| (s.reverse(), m))
        }
        (
            CellValue::Rank {
                set: c1,
                offset: o1,
            },
            CellValue::Rank {
                set: c2,
                offset: o2,
            },
        ) => rank_versus_rank(c1, o1, c2, o2),
    }
}

/// `|C ∩ [1,t]| + o > b` holds from `nth(C, floor(b − o) + 1)` on.
fn rank_above(set: &IndexSet, offset: &BigInt, b: &BigRational) -> Option<(Ordering, BigUint)> {
    let needed: BigInt = floor_rational(&(b - BigRational::from_integer(offset.clone()))) + 1;
    if !needed.is_positive() {
        return Some((Ordering::Greater, BigUint::zero()));
    }
    let at = set.nth_element(&needed.to_biguint()?).ok()?;
    Some((Ordering::Greater, at - 1u32))
}

fn rank_versus_rank(
    c1: &IndexSet,
    o1: &BigInt,
    c2: &IndexSet,
    o2: &BigInt,
) -> Option<(Ordering, BigUint)> {
    if let Some(bound) = c1.finite_symdiff_bound(c2) {
        let diff = BigInt::from(c1.count(&bound)) - BigInt::from(c2.count(&bound)) + o1 - o2;
        return Some((diff.sign_ordering(), bound));
    }
    let only_x = set_minus(c1, c2);
    let only_y = set_minus(c2, c1);
    if let Finiteness::Finite(bound) = only_y.finiteness() {
        return growing_difference(&only_x, &only_y, &bound, &(o1 - o2));
    }
    if let Finiteness::Finite(bound) = only_x.finiteness() {
        return growing_difference(&only_y, &only_x, &bound, &(o2 - o1))
            .map(|(s, m)| (s.reverse(), m));
    }
    None
}

/// Past `bound`, the difference is `|grow ∩ [1,t]| − |fixed| + o`, which is nondecreasing.
fn growing_difference(
    grow: &IndexSet,
    fixed: &IndexSet,
    bound: &BigUint,
    o: &BigInt,
) -> Option<(Ordering, BigUint)> {
    let needed: BigInt = BigInt::from(fixed.count(bound)) - o + 1;
    if !needed.is_positive() {
        return Some((Ordering::Greater, bound.clone()));
    }
    let at = grow.nth_element(&needed.to_biguint()?).ok()?;
    Some((Ordering::Greater, bound.clone().max(at - 1u32)))
}

trait SignOrdering {
    fn sign_ordering(&self) -> Ordering;
}

impl SignOrdering for BigInt {
    fn sign_ordering(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

fn describe(cell: &CellValue) -> String {
    match cell {
        CellValue::Const(q) => crate::num::format_rational(q),
        CellValue::Rank { set, offset } => format!("rank({set}) + {offset}"),
    }
}

/// Exact comparison, or the reason none was found.
pub fn compare(x: &Stream, y: &Stream, horizon: u64) -> Result<Comparison, Unresolved> {
    let (cx, cy) = (x.cells(), y.cells());
    let mut threshold = BigUint::from(permutation_bound(x).max(permutation_bound(y)));
    let mut tails: [Vec<IndexSet>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut signed = Vec::new();
    for a in &cx {
        for b in &cy {
            if a.region.disjoint_from(&b.region) {
                continue;
            }
            let region = meet(&a.region, &b.region);
            match eventual_sign(&a.value, &b.value) {
                Some(_) if region.is_empty() == Some(true) => {}
                Some((sign, from)) => {
                    threshold = threshold.max(from);
                    let slot = match sign {
                        Ordering::Greater => 0,
                        Ordering::Equal => 1,
                        Ordering::Less => 2,
                    };
                    signed.push((region.clone(), sign));
                    tails[slot].push(region);
                }
                None if region.is_empty() == Some(true) => {}
                None => {
                    return Err(Unresolved::Cells {
                        left: describe(&a.value),
                        right: describe(&b.value),
                    })
                }
            }
        }
    }
    let threshold = match threshold.to_u64() {
        Some(m) if m <= horizon => m,
        _ => {
            return Err(Unresolved::ThresholdBeyondHorizon {
                threshold: threshold.to_string(),
                horizon,
            })
        }
    };
    let scan = Scan::run(x, y, threshold);
    let eq_prefix: Vec<u64> = {
        let mut differ = scan.gt.iter().chain(&scan.lt).copied().collect::<Vec<_>>();
        differ.sort_unstable();
        let mut out = Vec::new();
        let mut k = 0;
        for t in 1..=threshold {
            if k < differ.len() && differ[k] == t {
                k += 1;
            } else {
                out.push(t);
            }
        }
        out
    };
    // the cells of each stream partition ℕ, so a sign met by every overlap covers ℕ
    let covers =
        |slot: usize| !tails[slot].is_empty() && (0..3).all(|o| o == slot || tails[o].is_empty());
    let whole = [covers(0), covers(1), covers(2)];
    let [gt_tail, eq_tail, lt_tail] = tails;
    let assemble = |prefix: &[u64], tail: Vec<IndexSet>, full: bool| -> IndexSet {
        if full && prefix.len() as u64 == threshold {
            return IndexSet::naturals();
        }
        let tail = match full {
            true => Some(IndexSet::naturals()),
            false => (!tail.is_empty()).then(|| IndexSet::union_all(tail)),
        };
        let tail = match tail {
            Some(t) if threshold > 0 => Some(IndexSet::diff(
                t,
                IndexSet::initial_segment(&BigUint::from(threshold)),
            )),
            other => other,
        };
        match (prefix.is_empty(), tail) {
            (true, None) => IndexSet::empty(),
            (true, Some(t)) => t,
            (false, None) => IndexSet::from_sorted_runs(prefix),
            (false, Some(t)) => IndexSet::union(IndexSet::from_sorted_runs(prefix), t),
        }
    };
    Ok(Comparison {
        gt: assemble(&scan.gt, gt_tail, whole[0]),
        eq: assemble(&eq_prefix, eq_tail, whole[1]),
        lt: assemble(&scan.lt, lt_tail, whole[2]),
        threshold,
        tails: signed,
    })
}

/// Coordinates where `x_t > y_t`.
pub fn strict_set(x: &Stream, y: &Stream, horizon: u64) -> StrictSet {
    match compare(x, y, horizon) {
        Ok(c) => StrictSet::Exact(c.gt),
        Err(_) => {
            let scan = Scan::run(x, y, horizon);
            StrictSet::Undecided {
                horizon,
                witnesses: scan.gt.into_iter().take(64).collect(),
            }
        }
    }
}
