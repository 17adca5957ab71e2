//! Pareto dominance predicates, anonymity, and the Suppes–Sen and lexicographic orders.
//!
//! Every predicate asks first whether `x ≥ y` holds everywhere, then tests its own
//! condition on the strict set `{t : x_t > y_t}`. Verdicts are never guessed: when the
//! structural comparison fails and a scan of `[1, horizon]` finds no counterexample,
//! the answer is `Undecided`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::num::format_rational;
use crate::setalg::{DensityResult, Finiteness, IndexSet};
use crate::streams::{compare, Comparison, FinitePermutation, Scan, Stream, Unresolved};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Incomparable,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The strict set, with its density certificate in the verdict.
    StrictSet { set: String },
    /// A coordinate breaking the claim.
    Coordinate { t: String, x: String, y: String },
    /// `inf (x_t − y_t)` together with the strict set.
    Gap { set: String, gap: String },
    /// A finite permutation `π` with `x_{π(t)} ≥ y_t` for every `t`.
    Permutation { perm: String },
    /// Strict coordinates met by a finite scan.
    Scan { strict: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationVerdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub densities: Option<DensityResult>,
    pub horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl RelationVerdict {
    pub(crate) fn new(status: Status, horizon: u64) -> Self {
        RelationVerdict {
            status,
            witness: None,
            densities: None,
            horizon,
            detail: None,
        }
    }

    pub(crate) fn witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub(crate) fn densities(mut self, d: DensityResult) -> Self {
        self.densities = Some(d);
        self
    }

    pub(crate) fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }
}

/// The dominance predicates, strongest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Uniform,
    Weak,
    AlmostWeak,
    DensityOne,
    Lower,
    Upper,
    Infinite,
    Pareto,
}

impl Predicate {
    /// Strongest first: each predicate implies the next.
    pub const CHAIN: [Predicate; 8] = [
        Predicate::Uniform,
        Predicate::Weak,
        Predicate::AlmostWeak,
        Predicate::DensityOne,
        Predicate::Lower,
        Predicate::Upper,
        Predicate::Infinite,
        Predicate::Pareto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::Uniform => "uniform",
            Predicate::Weak => "weak",
            Predicate::AlmostWeak => "almost_weak",
            Predicate::DensityOne => "density_one",
            Predicate::Lower => "lower",
            Predicate::Upper => "upper",
            Predicate::Infinite => "infinite",
            Predicate::Pareto => "pareto",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Predicate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let found = Predicate::CHAIN.into_iter().find(|p| {
            p.name() == key
                || matches!(
                    (p, key.as_str()),
                    (Predicate::Lower, "lower_asym" | "lower_asymptotic")
                        | (Predicate::Upper, "upper_asym" | "upper_asymptotic")
                        | (Predicate::Weak, "weak_pareto")
                        | (Predicate::Infinite, "infinite_pareto")
                )
        });
        found.ok_or_else(|| {
            let names: Vec<_> = Predicate::CHAIN.iter().map(|p| p.name()).collect();
            format!("unknown axiom `{s}` (expected one of {})", names.join(", "))
        })
    }
}

/// Facts about a pair shared by all predicates.
#[derive(Clone, Debug)]
pub struct PairAnalysis {
    pub horizon: u64,
    pub comparison: Result<Comparison, Unresolved>,
    x: Stream,
    y: Stream,
    /// Density of the strict set, shared by the density predicates.
    strict_density: OnceLock<DensityResult>,
}

fn value_witness(x: &Stream, y: &Stream, t: &BigUint) -> Witness {
    let show = |s: &Stream| s.eval(t).map(|v| format_rational(&v)).unwrap_or_default();
    Witness::Coordinate {
        t: t.to_string(),
        x: show(x),
        y: show(y),
    }
}

/// Least element, `Some(None)` for a provably empty set, `None` when unknown.
fn first_element(set: &IndexSet, horizon: u64) -> Option<Option<BigUint>> {
    match set.is_empty() {
        Some(true) => return Some(None),
        Some(false) => {
            if let Some(&t) = set.elements_upto(horizon.min(1 << 16)).first() {
                return Some(Some(BigUint::from(t)));
            }
            return set.nth(1).ok().map(Some);
        }
        None => {}
    }
    set.elements_upto(horizon)
        .first()
        .map(|&t| Some(BigUint::from(t)))
}

fn strict_density(c: &Comparison) -> DensityResult {
    let d = c.gt.density();
    if d.exact {
        return d;
    }
    // ℕ \ S = eq ∪ lt, which can be the simpler side
    let rest = IndexSet::union(c.eq.clone(), c.lt.clone()).density();
    if rest.exact {
        rest.complement()
    } else {
        d
    }
}

fn positive(q: &BigRational) -> bool {
    q.is_positive()
}

impl PairAnalysis {
    pub fn new(x: &Stream, y: &Stream, horizon: u64) -> Self {
        PairAnalysis {
            horizon,
            comparison: compare(x, y, horizon),
            x: x.clone(),
            y: y.clone(),
            strict_density: OnceLock::new(),
        }
    }

    /// `x ≥ y` at every coordinate.
    pub fn weak_dominance(&self) -> RelationVerdict {
        let h = self.horizon;
        match &self.comparison {
            Ok(c) => match first_element(&c.lt, h) {
                Some(None) => RelationVerdict::new(Status::Holds, h).witness(Witness::StrictSet {
                    set: c.gt.to_string(),
                }),
                Some(Some(t)) => RelationVerdict::new(Status::Fails, h)
                    .witness(value_witness(&self.x, &self.y, &t))
                    .detail("x_t < y_t"),
                None => RelationVerdict::new(Status::Undecided, h).detail("sign set not decided"),
            },
            Err(reason) => {
                let scan = Scan::run(&self.x, &self.y, h);
                match scan.lt.first() {
                    Some(&t) => RelationVerdict::new(Status::Fails, h)
                        .witness(value_witness(&self.x, &self.y, &BigUint::from(t)))
                        .detail("x_t < y_t"),
                    None => {
                        RelationVerdict::new(Status::Undecided, h).detail(unresolved_text(reason))
                    }
                }
            }
        }
    }

    pub fn evaluate(&self, predicate: Predicate) -> RelationVerdict {
        let h = self.horizon;
        let weak = self.weak_dominance();
        if weak.status != Status::Holds {
            return weak;
        }
        let c = self
            .comparison
            .as_ref()
            .expect("weak dominance holds only on a comparison");
        let s = &c.gt;
        let set_witness = || Witness::StrictSet { set: s.to_string() };
        let verdict = |status: Status| RelationVerdict::new(status, h).witness(set_witness());
        match predicate {
            Predicate::Pareto => match first_element(s, h) {
                Some(Some(t)) => RelationVerdict::new(Status::Holds, h)
                    .witness(value_witness(&self.x, &self.y, &t))
                    .detail("x ≥ y with a strict coordinate"),
                Some(None) => verdict(Status::Fails).detail("strict set is empty"),
                None => verdict(Status::Undecided)
                    .detail("no strict coordinate found up to the horizon"),
            },
            Predicate::Infinite => match s.finiteness() {
                Finiteness::Infinite => verdict(Status::Holds),
                Finiteness::Finite(b) => {
                    verdict(Status::Fails).detail(format!("strict set lies in [1, {b}]"))
                }
                Finiteness::Unknown => {
                    // positive upper density forces infinitely many elements
                    let d = self.strict_density.get_or_init(|| strict_density(c));
                    if positive(d.lower.lo().max(d.upper.lo())) {
                        verdict(Status::Holds).detail("strict set has positive density")
                    } else {
                        verdict(Status::Undecided)
                    }
                }
            },
            Predicate::Upper | Predicate::Lower | Predicate::DensityOne => {
                let d = self.strict_density.get_or_init(|| strict_density(c));
                let (lower, upper) = (&d.lower, &d.upper);
                // upper density dominates lower density
                let upper_lo = lower.lo().max(upper.lo());
                let lower_hi = lower.hi().min(upper.hi());
                let status = match predicate {
                    Predicate::Upper if positive(upper_lo) => Status::Holds,
                    Predicate::Upper if upper.hi().is_zero() => Status::Fails,
                    Predicate::Lower if positive(lower.lo()) => Status::Holds,
                    Predicate::Lower if lower_hi.is_zero() => Status::Fails,
                    Predicate::DensityOne if lower.lo().is_one() => Status::Holds,
                    Predicate::DensityOne if lower_hi < &BigRational::one() => Status::Fails,
                    _ => Status::Undecided,
                };
                verdict(status).densities(d.clone())
            }
            Predicate::AlmostWeak => match s.cofiniteness() {
                Finiteness::Finite(b) => {
                    verdict(Status::Holds).detail(format!("every t > {b} is strict"))
                }
                Finiteness::Infinite => {
                    verdict(Status::Fails).detail("infinitely many coordinates are not strict")
                }
                // ℕ \ S = eq ∪ lt
                Finiteness::Unknown => {
                    match IndexSet::union(c.eq.clone(), c.lt.clone()).finiteness() {
                        Finiteness::Finite(b) => {
                            verdict(Status::Holds).detail(format!("every t > {b} is strict"))
                        }
                        Finiteness::Infinite => verdict(Status::Fails)
                            .detail("infinitely many coordinates are not strict"),
                        Finiteness::Unknown => verdict(Status::Undecided),
                    }
                }
            },
            Predicate::Weak | Predicate::Uniform => {
                match first_element(&c.eq, h) {
                    Some(Some(t)) => {
                        return RelationVerdict::new(Status::Fails, h)
                            .witness(value_witness(&self.x, &self.y, &t))
                            .detail("x_t = y_t")
                    }
                    None => return verdict(Status::Undecided),
                    Some(None) => {}
                }
                if predicate == Predicate::Weak {
                    return verdict(Status::Holds);
                }
                match self.uniform_gap(c) {
                    Some(gap) if positive(&gap) => {
                        RelationVerdict::new(Status::Holds, h).witness(Witness::Gap {
                            set: s.to_string(),
                            gap: format_rational(&gap),
                        })
                    }
                    Some(_) => {
                        verdict(Status::Fails).detail("infimum of x_t − y_t is not positive")
                    }
                    None => {
                        verdict(Status::Undecided).detail("gap not attained on a decidable region")
                    }
                }
            }
        }
    }

    /// `inf_t (x_t − y_t)` when every region's difference is constant or nondecreasing.
    fn uniform_gap(&self, c: &Comparison) -> Option<BigRational> {
        let mut best: Option<BigRational> = None;
        let mut take = |v: BigRational| {
            if best.as_ref().map_or(true, |b| &v < b) {
                best = Some(v);
            }
        };
        let (px, py) = (self.x.prefix(c.threshold), self.y.prefix(c.threshold));
        for (a, b) in px.iter().zip(&py) {
            take(a - b);
        }
        let past = BigUint::from(c.threshold);
        for (region, _) in &c.tails {
            if let Finiteness::Finite(b) = region.finiteness() {
                if b <= past {
                    continue;
                }
            }
            // past the horizon, search only when finiteness is decided
            let probe = match region
                .elements_upto(self.horizon)
                .into_iter()
                .find(|&t| t > c.threshold)
            {
                Some(t) => Some(BigUint::from(t)),
                None if region.finiteness().is_finite().is_some() => region.next_after(&past),
                None if region.is_empty() == Some(true) => None,
                None => return None,
            };
            if let Some(t) = probe {
                take(self.x.eval(&t).ok()? - self.y.eval(&t).ok()?);
            }
        }
        best
    }
}

fn unresolved_text(reason: &Unresolved) -> String {
    match reason {
        Unresolved::Cells { left, right } => format!("no eventual sign between {left} and {right}"),
        Unresolved::ThresholdBeyondHorizon { threshold, horizon } => {
            format!("sign stabilizes only after {threshold}, beyond horizon {horizon}")
        }
    }
}

pub fn dominates(predicate: Predicate, x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    PairAnalysis::new(x, y, horizon).evaluate(predicate)
}

/// `x ≥ y` at every coordinate.
pub fn weakly_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    PairAnalysis::new(x, y, horizon).weak_dominance()
}

pub fn pareto_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    dominates(Predicate::Pareto, x, y, horizon)
}

pub fn infinite_pareto_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    dominates(Predicate::Infinite, x, y, horizon)
}

pub fn upper_asym_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    dominates(Predicate::Upper, x, y, horizon)
}

pub fn lower_asym_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    dominates(Predicate::Lower, x, y, horizon)
}

pub fn density_one_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    dominates(Predicate::DensityOne, x, y, horizon)
}

pub fn almost_weak_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    dominates(Predicate::AlmostWeak, x, y, horizon)
}

pub fn weak_pareto_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    dominates(Predicate::Weak, x, y, horizon)
}

pub fn uniform_dominates(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    dominates(Predicate::Uniform, x, y, horizon)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainEntry {
    pub predicate: Predicate,
    pub verdict: RelationVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub entries: Vec<ChainEntry>,
    /// Whenever a predicate holds, so does every weaker one.
    pub monotone: bool,
}

impl ChainReport {
    pub fn status(&self, p: Predicate) -> Status {
        self.entries
            .iter()
            .find(|e| e.predicate == p)
            .map_or(Status::Undecided, |e| e.verdict.status)
    }
}

/// All eight predicates, strongest first.
pub fn implication_chain_report(x: &Stream, y: &Stream, horizon: u64) -> ChainReport {
    let analysis = PairAnalysis::new(x, y, horizon);
    let entries: Vec<ChainEntry> = Predicate::CHAIN
        .into_iter()
        .map(|predicate| ChainEntry {
            predicate,
            verdict: analysis.evaluate(predicate),
        })
        .collect();
    let monotone = chain_is_monotone(&entries.iter().map(|e| e.verdict.status).collect::<Vec<_>>());
    ChainReport { entries, monotone }
}

/// Statuses listed strongest first: once one holds, all later ones hold.
pub fn chain_is_monotone(statuses: &[Status]) -> bool {
    match statuses.iter().position(|s| *s == Status::Holds) {
        Some(i) => statuses[i..].iter().all(|s| *s == Status::Holds),
        None => true,
    }
}

/// Ascending sorts of both windows compare coordinatewise.
pub fn sorted_window_dominates(x: &[BigRational], y: &[BigRational]) -> bool {
    assert_eq!(x.len(), y.len(), "windows must have equal length");
    let (mut a, mut b) = (x.to_vec(), y.to_vec());
    a.sort();
    b.sort();
    a.iter().zip(&b).all(|(p, q)| p >= q)
}

/// A permutation `π` of `[1, n]` with `x_{π(t)} ≥ y_t`, pairing the sorted windows.
pub(crate) fn pairing_permutation(x: &[BigRational], y: &[BigRational]) -> FinitePermutation {
    let mut xi: Vec<usize> = (0..x.len()).collect();
    let mut yi: Vec<usize> = (0..y.len()).collect();
    xi.sort_by(|&i, &j| x[i].cmp(&x[j]).then(i.cmp(&j)));
    yi.sort_by(|&i, &j| y[i].cmp(&y[j]).then(i.cmp(&j)));
    let mut images = vec![0u64; x.len()];
    for (&ti, &si) in yi.iter().zip(&xi) {
        images[ti] = si as u64 + 1;
    }
    FinitePermutation::from_images(images).expect("pairing of two orders is a bijection")
}

enum Grading {
    Yes(FinitePermutation),
    No(String),
    Unknown(String),
}

/// Does some finite permutation of `x` weakly dominate `y`?
fn suppes_sen_direction(x: &Stream, y: &Stream, horizon: u64) -> Grading {
    let c = match compare(x, y, horizon) {
        Ok(c) => c,
        Err(reason) => return Grading::Unknown(unresolved_text(&reason)),
    };
    let lt_bound = match c.lt.finiteness() {
        Finiteness::Finite(b) => b,
        Finiteness::Infinite => return Grading::No("x_t < y_t at infinitely many t".into()),
        Finiteness::Unknown => return Grading::Unknown("finiteness of {x < y} not decided".into()),
    };
    let gt_bound = match c.gt.finiteness() {
        Finiteness::Finite(b) => Some(b),
        _ => None,
    };
    let Some(start) = lt_bound.to_u64().filter(|&b| b <= horizon) else {
        return Grading::Unknown(format!("x < y reaches past the horizon (bound {lt_bound})"));
    };
    // past `lt_bound`, extending the window by a pair with x_t ≥ y_t preserves dominance
    let window = |n: u64| (x.prefix(n), y.prefix(n));
    match gt_bound.and_then(|b| b.to_u64()) {
        Some(g) if g <= horizon => {
            let n = start.max(g);
            let (a, b) = window(n);
            if sorted_window_dominates(&a, &b) {
                Grading::Yes(pairing_permutation(&a, &b))
            } else {
                // the streams agree past n, and equal pairs never change the verdict
                Grading::No(format!(
                    "sorted window [1, {n}] of x does not dominate that of y"
                ))
            }
        }
        _ => {
            let (a, b) = window(horizon);
            let mut n = start.max(1);
            while n <= horizon {
                if sorted_window_dominates(&a[..n as usize], &b[..n as usize]) {
                    return Grading::Yes(pairing_permutation(&a[..n as usize], &b[..n as usize]));
                }
                n += 1;
            }
            Grading::Unknown(format!("no dominating window found up to {horizon}"))
        }
    }
}

/// Suppes–Sen grading: `Holds` when a finite permutation of `x` weakly dominates `y`,
/// `Fails` when only the converse holds, `Incomparable` when neither does.
pub fn suppes_sen_compare(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    let forward = suppes_sen_direction(x, y, horizon);
    if let Grading::Yes(perm) = forward {
        return RelationVerdict::new(Status::Holds, horizon).witness(Witness::Permutation {
            perm: perm.to_string(),
        });
    }
    let backward = suppes_sen_direction(y, x, horizon);
    match (forward, backward) {
        (Grading::No(why), Grading::Yes(perm)) => RelationVerdict::new(Status::Fails, horizon)
            .witness(Witness::Permutation {
                perm: perm.to_string(),
            })
            .detail(format!("{why}; y is above x")),
        (Grading::No(a), Grading::No(b)) => RelationVerdict::new(Status::Incomparable, horizon)
            .detail(format!("x over y: {a}; y over x: {b}")),
        (Grading::Unknown(why), _) | (_, Grading::Unknown(why)) => {
            RelationVerdict::new(Status::Undecided, horizon).detail(why)
        }
        (Grading::Yes(_), _) => unreachable!(),
    }
}

/// Lexicographic order: `x` is above `y` when they first differ at some `T` with `x_T > y_T`.
pub fn lex_compare(x: &Stream, y: &Stream, horizon: u64) -> RelationVerdict {
    let first = |t: Option<BigUint>, sign: Ordering| t.map(|t| (t, sign));
    let found = match compare(x, y, horizon) {
        Ok(c) => {
            let gt = first_element(&c.gt, horizon);
            let lt = first_element(&c.lt, horizon);
            match (gt, lt) {
                (Some(g), Some(l)) => {
                    let cands = [first(g, Ordering::Greater), first(l, Ordering::Less)];
                    let best = cands.into_iter().flatten().min_by(|a, b| a.0.cmp(&b.0));
                    match best {
                        Some(b) => Some(b),
                        None => {
                            return RelationVerdict::new(Status::Fails, horizon)
                                .detail("streams are equal")
                        }
                    }
                }
                _ => None,
            }
        }
        Err(_) => None,
    };
    let found = found.or_else(|| {
        let scan = Scan::run(x, y, horizon);
        let g = scan
            .gt
            .first()
            .map(|&t| (BigUint::from(t), Ordering::Greater));
        let l = scan.lt.first().map(|&t| (BigUint::from(t), Ordering::Less));
        [g, l].into_iter().flatten().min_by(|a, b| a.0.cmp(&b.0))
    });
    match found {
        Some((t, sign)) => {
            let status = if sign == Ordering::Greater {
                Status::Holds
            } else {
                Status::Fails
            };
            RelationVerdict::new(status, horizon)
                .witness(value_witness(x, y, &t))
                .detail(format!("first difference at T = {t}"))
        }
        None => {
            RelationVerdict::new(Status::Undecided, horizon).detail("equal on the scanned prefix")
        }
    }
}

/// `y = x ∘ π` for some finite permutation `π`, when decidable.
pub fn anonymity_equivalent(x: &Stream, y: &Stream, horizon: u64) -> Option<bool> {
    let c = compare(x, y, horizon).ok()?;
    let differ = IndexSet::union(c.gt.clone(), c.lt.clone());
    let bound = match differ.finiteness() {
        Finiteness::Finite(b) => b.to_u64()?,
        Finiteness::Infinite => return Some(false),
        Finiteness::Unknown => return None,
    };
    let (mut a, mut b) = (x.prefix(bound), y.prefix(bound));
    a.sort();
    b.sort();
    Some(a == b)
}
