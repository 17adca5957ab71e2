//! Lower and upper asymptotic densities.
//!
//! Each node gets a pair of enclosures, one for the lower density and one for the
//! upper density. Leaves in the decidable fragment produce degenerate enclosures;
//! boolean nodes combine them with sound interval rules. When an enclosure does not
//! collapse, the result is flagged as an estimate and carries count ratios at a fixed
//! checkpoint schedule.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{FactorialFamily, Finiteness, IndexSet};
use crate::num::{factorial_u64, format_rational};
use crate::sternbrocot::limiting_fraction_below;

/// Largest `k` whose factorial is used as a checkpoint by default.
pub const DEFAULT_CHECKPOINT_K: u64 = 10;

/// Closed interval of rationals known to contain a density value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    fn exact(q: BigRational) -> Self {
        Enclosure {
            lo: q.clone(),
            hi: q,
        }
    }

    fn unknown() -> Self {
        Enclosure {
            lo: BigRational::zero(),
            hi: BigRational::one(),
        }
    }

    fn flip(&self) -> Self {
        let one = BigRational::one();
        Enclosure {
            lo: &one - &self.hi,
            hi: &one - &self.lo,
        }
    }

    fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DensityEnclosure {
    pub lower: Enclosure,
    pub upper: Enclosure,
}

impl DensityEnclosure {
    fn exact(q: BigRational) -> Self {
        DensityEnclosure {
            lower: Enclosure::exact(q.clone()),
            upper: Enclosure::exact(q),
        }
    }

    fn split(lower: BigRational, upper: BigRational) -> Self {
        DensityEnclosure {
            lower: Enclosure::exact(lower),
            upper: Enclosure::exact(upper),
        }
    }

    fn unknown() -> Self {
        DensityEnclosure {
            lower: Enclosure::unknown(),
            upper: Enclosure::unknown(),
        }
    }

    fn complement(&self) -> Self {
        DensityEnclosure {
            lower: self.upper.flip(),
            upper: self.lower.flip(),
        }
    }

    fn has_density(&self) -> Option<&BigRational> {
        (self.lower.is_exact() && self.upper.is_exact() && self.lower.lo == self.upper.lo)
            .then_some(&self.lower.lo)
    }

    fn union(a: &Self, b: &Self) -> Self {
        let one = BigRational::one();
        let min3 = |x: BigRational, y: BigRational, z: BigRational| x.min(y).min(z);
        DensityEnclosure {
            lower: Enclosure {
                lo: a.lower.lo.clone().max(b.lower.lo.clone()),
                hi: min3(
                    one.clone(),
                    &a.lower.hi + &b.upper.hi,
                    &a.upper.hi + &b.lower.hi,
                ),
            },
            upper: Enclosure {
                lo: a.upper.lo.clone().max(b.upper.lo.clone()),
                hi: one.min(&a.upper.hi + &b.upper.hi),
            },
        }
    }

    /// Union of disjoint sets where `a` has a density `alpha`: both densities shift by `alpha`.
    fn disjoint_union(alpha: &BigRational, b: &Self) -> Self {
        let one = BigRational::one();
        let shift = |e: &Enclosure| Enclosure {
            lo: (alpha + &e.lo).min(one.clone()),
            hi: (alpha + &e.hi).min(one.clone()),
        };
        DensityEnclosure {
            lower: shift(&b.lower),
            upper: shift(&b.upper),
        }
    }
}

/// Lower or upper density: an exact rational, or a sound enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityBound {
    Exact(BigRational),
    Estimate { lo: BigRational, hi: BigRational },
}

impl DensityBound {
    fn from_enclosure(e: &Enclosure) -> Self {
        if e.is_exact() {
            DensityBound::Exact(e.lo.clone())
        } else {
            DensityBound::Estimate {
                lo: e.lo.clone(),
                hi: e.hi.clone(),
            }
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            DensityBound::Exact(q) => Some(q),
            DensityBound::Estimate { .. } => None,
        }
    }

    /// Greatest value the density is known to be at least.
    pub fn lo(&self) -> &BigRational {
        match self {
            DensityBound::Exact(q) => q,
            DensityBound::Estimate { lo, .. } => lo,
        }
    }

    /// Least value the density is known to be at most.
    pub fn hi(&self) -> &BigRational {
        match self {
            DensityBound::Exact(q) => q,
            DensityBound::Estimate { hi, .. } => hi,
        }
    }
}

impl Serialize for DensityBound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            DensityBound::Exact(q) => serializer.serialize_str(&format_rational(q)),
            DensityBound::Estimate { lo, hi } => {
                let mut st = serializer.serialize_struct("Estimate", 2)?;
                st.serialize_field("lo", &format_rational(lo))?;
                st.serialize_field("hi", &format_rational(hi))?;
                st.end()
            }
        }
    }
}

/// Count ratio at one checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub n: u64,
    pub count: u64,
    pub ratio: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityResult {
    pub lower: DensityBound,
    pub upper: DensityBound,
    pub exact: bool,
    pub evidence: Vec<Checkpoint>,
}

impl DensityResult {
    /// The asymptotic density, when both sides are exact and equal.
    pub fn density(&self) -> Option<&BigRational> {
        match (&self.lower, &self.upper) {
            (DensityBound::Exact(a), DensityBound::Exact(b)) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn is_density_one(&self) -> bool {
        self.density().is_some_and(One::is_one)
    }

    /// Densities of `ℕ \ S` from those of `S`.
    pub fn complement(&self) -> DensityResult {
        let flip = |q: &BigRational| BigRational::one() - q;
        let side = |b: &DensityBound| match b {
            DensityBound::Exact(q) => DensityBound::Exact(flip(q)),
            DensityBound::Estimate { lo, hi } => DensityBound::Estimate {
                lo: flip(hi),
                hi: flip(lo),
            },
        };
        let evidence = self
            .evidence
            .iter()
            .map(|c| {
                let count = c.n - c.count;
                Checkpoint {
                    n: c.n,
                    count,
                    ratio: format_rational(&BigRational::new(count.into(), c.n.into())),
                }
            })
            .collect();
        DensityResult {
            lower: side(&self.upper),
            upper: side(&self.lower),
            exact: self.exact,
            evidence,
        }
    }
}

/// `{k! : 3 <= k <= max_k} ∪ {2^j : 2^j <= max_k!}`, increasing.
/// Largest checkpoint reached by a single membership sweep.
const EVIDENCE_SWEEP_LIMIT: u64 = 1 << 22;

pub fn checkpoint_schedule(max_k: u64) -> Vec<u64> {
    let top = factorial_u64(max_k).to_u64().unwrap_or(u64::MAX);
    let mut points: Vec<u64> = (3..=max_k)
        .filter_map(|k| factorial_u64(k).to_u64())
        .collect();
    let mut p = 2u64;
    while p <= top {
        points.push(p);
        match p.checked_mul(2) {
            Some(next) => p = next,
            None => break,
        }
    }
    points.sort_unstable();
    points.dedup();
    points
}

fn ratio(numer: &BigUint, denom: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(numer.clone()), BigInt::from(denom.clone()))
}

impl IndexSet {
    pub(crate) fn density_bounds(&self) -> DensityEnclosure {
        let bounds = self.structural_density_bounds();
        if bounds.lower.is_exact() && bounds.upper.is_exact() {
            return bounds;
        }
        // an eventually constant combination has density 0 or 1
        match self.guarded_eventual_value() {
            Some((true, _)) => DensityEnclosure::exact(BigRational::one()),
            Some((false, _)) => DensityEnclosure::exact(BigRational::zero()),
            None => bounds,
        }
    }

    fn structural_density_bounds(&self) -> DensityEnclosure {
        if let Some(p) = self.periodic() {
            let end = &p.threshold + &p.period;
            let hits = self.count(&end) - self.count(&p.threshold);
            return DensityEnclosure::exact(ratio(&hits, &p.period));
        }
        match self {
            IndexSet::FactorialPoints(_) => DensityEnclosure::exact(BigRational::zero()),
            IndexSet::EnumThreshold(r) => {
                // Values increase along each level of the tree, so the count ratio dips
                // lowest right before the members of a level start, and peaks at a level end.
                let below = limiting_fraction_below(r);
                let above = BigRational::one() - &below;
                let lower = &above / (BigRational::one() + &below);
                DensityEnclosure::split(lower, above)
            }
            IndexSet::FactorialIntervals(FactorialFamily::Explicit(_)) => {
                DensityEnclosure::exact(BigRational::zero())
            }
            IndexSet::FactorialIntervals(family) => {
                let seq = family.sequence().expect("patterned family");
                match (family, seq.finiteness()) {
                    (_, Finiteness::Finite(_)) => DensityEnclosure::exact(BigRational::zero()),
                    (FactorialFamily::Alternating(_), Finiteness::Infinite) => {
                        DensityEnclosure::split(BigRational::zero(), BigRational::one())
                    }
                    (FactorialFamily::Cover(_), Finiteness::Infinite) => {
                        DensityEnclosure::exact(BigRational::one())
                    }
                    _ => DensityEnclosure::unknown(),
                }
            }
            IndexSet::Compl(a) => a.density_bounds().complement(),
            IndexSet::Union(a, b) => union_bounds(a, &a.density_bounds(), b, &b.density_bounds()),
            IndexSet::Inter(a, b) => {
                // A ∩ B = ℕ \ (ℕ\A ∪ ℕ\B)
                let (ca, cb) = (
                    a.density_bounds().complement(),
                    b.density_bounds().complement(),
                );
                DensityEnclosure::union(&ca, &cb).complement()
            }
            IndexSet::Diff(a, b) => {
                let (ca, db) = (a.density_bounds().complement(), b.density_bounds());
                DensityEnclosure::union(&ca, &db).complement()
            }
            // periodic leaves are handled above
            IndexSet::Finite(_) | IndexSet::ArithProg { .. } | IndexSet::Interval { .. } => {
                unreachable!("periodic leaf")
            }
        }
    }

    pub fn lower_density(&self) -> DensityBound {
        DensityBound::from_enclosure(&self.density_bounds().lower)
    }

    pub fn upper_density(&self) -> DensityBound {
        DensityBound::from_enclosure(&self.density_bounds().upper)
    }

    /// Densities with the default checkpoint schedule for the evidence.
    pub fn density(&self) -> DensityResult {
        self.density_with_checkpoints(DEFAULT_CHECKPOINT_K)
    }

    pub fn density_with_checkpoints(&self, max_k: u64) -> DensityResult {
        let bounds = self.density_bounds();
        let exact = bounds.lower.is_exact() && bounds.upper.is_exact();
        let evidence = if exact {
            Vec::new()
        } else {
            self.checkpoint_evidence(max_k)
        };
        DensityResult {
            lower: DensityBound::from_enclosure(&bounds.lower),
            upper: DensityBound::from_enclosure(&bounds.upper),
            exact,
            evidence,
        }
    }

    pub fn checkpoint_evidence(&self, max_k: u64) -> Vec<Checkpoint> {
        let schedule = checkpoint_schedule(max_k);
        let top = schedule.last().copied().unwrap_or(0);
        // one membership sweep serves every checkpoint of a boolean combination
        let prefix: Option<Vec<u32>> = (self.is_boolean_node() && top <= EVIDENCE_SWEEP_LIMIT)
            .then(|| {
                let mask = self.mask(top as usize);
                let mut acc = 0u32;
                mask.iter()
                    .map(|&b| {
                        acc += u32::from(b);
                        acc
                    })
                    .collect()
            });
        schedule
            .into_iter()
            .map(|n| {
                let big_n = BigUint::from(n);
                let count = match &prefix {
                    Some(p) => BigUint::from(p[n as usize]),
                    None => self.count(&big_n),
                };
                Checkpoint {
                    n,
                    count: count.to_u64().unwrap_or(u64::MAX),
                    ratio: format_rational(&ratio(&count, &big_n)),
                }
            })
            .collect()
    }
}

fn union_bounds(
    a: &IndexSet,
    da: &DensityEnclosure,
    b: &IndexSet,
    db: &DensityEnclosure,
) -> DensityEnclosure {
    let general = DensityEnclosure::union(da, db);
    let exact_side = match (da.has_density(), db.has_density()) {
        (Some(alpha), _) => Some((alpha, db)),
        (None, Some(beta)) => Some((beta, da)),
        (None, None) => None,
    };
    match exact_side {
        Some((alpha, other)) if !general.lower.is_exact() || !general.upper.is_exact() => {
            if a.disjoint_from(b) {
                DensityEnclosure::disjoint_union(alpha, other)
            } else {
                general
            }
        }
        _ => general,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rational_from_u64;
    use num_traits::Signed;

    fn q(p: u64, d: u64) -> BigRational {
        rational_from_u64(p, d)
    }

    #[test]
    fn schedule_shape() {
        let s = checkpoint_schedule(10);
        assert!(s.contains(&6) && s.contains(&3_628_800) && s.contains(&2_097_152));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*s.last().unwrap(), 3_628_800);
    }

    #[test]
    fn threshold_densities_match_level_ratios() {
        // For r = 1/2 the members of each level are its right half: lower 1/3, upper 1/2.
        let set = IndexSet::enum_threshold(q(1, 2));
        assert_eq!(set.lower_density(), DensityBound::Exact(q(1, 3)));
        assert_eq!(set.upper_density(), DensityBound::Exact(q(1, 2)));
        let n_end = BigUint::from((1u64 << 20) - 1);
        let at_end = ratio(&set.count(&n_end), &n_end);
        assert!((at_end - q(1, 2)).abs() < q(1, 1000));
        let n_dip = BigUint::from((1u64 << 20) - 1 + (1u64 << 19));
        let at_dip = ratio(&set.count(&n_dip), &n_dip);
        assert!((at_dip - q(1, 3)).abs() < q(1, 1000));
    }

    #[test]
    fn disjoint_union_shifts_exactly() {
        let evens = IndexSet::arith_prog(2u32, 2u32).unwrap();
        let alt = IndexSet::inter(
            IndexSet::alternating_blocks(IndexSet::naturals()),
            IndexSet::arith_prog(1u32, 2u32).unwrap(),
        );
        let d = IndexSet::union(evens, alt).density_bounds();
        assert_eq!(d.lower.lo, q(1, 2));
        assert!(d.lower.is_exact());
    }
}
