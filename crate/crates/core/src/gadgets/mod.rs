//! Finite reconstructions of the two impossibility gadgets, with every step that
//! can be checked on symbolic streams verified as a separate link.

mod lemma1;
mod lemma2;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::axioms::{
    pairing_permutation, sorted_window_dominates, RelationVerdict, Status, Witness,
};
use crate::num::format_rational;
use crate::setalg::IndexSet;
use crate::sternbrocot::nth_rational;
use crate::streams::{FinitePermutation, Stream};

pub use lemma1::{
    lemma1_build, lemma1_case_compare, lemma1_compare_thresholds, lemma1_from_base,
    lemma1_verify_p1ea, Lemma1Gadget,
};
pub use lemma2::{
    block_certificate, block_stream, check_l2e1, lemma2_build, lemma2_verify_case,
    sequence_from_prefix, BlockCertificate, InequalityCheck, Lemma2Case, Lemma2Gadget, MAX_M,
    MAX_TERM,
};

/// Longest window a gadget permutation is materialized on.
pub const WINDOW_LIMIT: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("threshold {0} must lie strictly between 0 and 1")]
    Threshold(String),
    #[error("thresholds must satisfy r < s (got r = {r}, s = {s})")]
    Order { r: String, s: String },
    #[error("U(s) is not provably contained in U(r)")]
    NotNested,
    #[error("U(r) \\ U(s) has fewer than two elements")]
    TooFewPoints,
    #[error("sequence must be strictly increasing positive integers: {0}")]
    Sequence(String),
    #[error("cardinality condition fails for m = {m}: {lhs} is not below {rhs}")]
    Condition { m: u64, lhs: String, rhs: String },
    #[error("no m up to {0} satisfies the cardinality condition")]
    NoAdmissibleM(u64),
    #[error("m = {m} is below the minimum {min}")]
    SmallM { m: u64, min: u64 },
    #[error("element {0} is too large for factorial arithmetic")]
    TooLarge(String),
    #[error("unknown case {0:?}")]
    UnknownCase(String),
}

/// The `k`-th rational of the canonical enumeration of `(0, 1)` (1-indexed).
pub fn rational_enum(k: u64) -> BigRational {
    nth_rational(&BigUint::from(k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    /// Checked on the symbolic streams.
    Verified,
    /// A premise of the case split, depending on the order being refuted.
    AssumedByCase,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Link {
    pub claim: String,
    pub kind: LinkKind,
    pub verdict: RelationVerdict,
}

impl Link {
    fn verified(claim: impl Into<String>, verdict: RelationVerdict) -> Self {
        Link {
            claim: claim.into(),
            kind: LinkKind::Verified,
            verdict,
        }
    }

    fn check(claim: impl Into<String>, ok: bool, horizon: u64, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Holds } else { Status::Fails };
        Link::verified(claim, RelationVerdict::new(status, horizon).detail(detail))
    }

    fn assumed(claim: impl Into<String>, horizon: u64) -> Self {
        Link {
            claim: claim.into(),
            kind: LinkKind::AssumedByCase,
            verdict: RelationVerdict::new(Status::Undecided, horizon).detail("premise of the case"),
        }
    }

    fn undecided(claim: impl Into<String>, horizon: u64, detail: impl Into<String>) -> Self {
        Link::verified(
            claim,
            RelationVerdict::new(Status::Undecided, horizon).detail(detail),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PermutationRecord {
    pub name: String,
    pub bound: u64,
    /// Number of points with `π(t) ≠ t`.
    pub moved: usize,
    #[serde(skip)]
    pub perm: FinitePermutation,
}

#[derive(Clone, Debug, Serialize)]
pub struct GadgetReport {
    pub gadget: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub parameters: Vec<(String, String)>,
    pub links: Vec<Link>,
    pub permutations: Vec<PermutationRecord>,
    pub status: Status,
    /// Named streams built by the gadget, for prefix dumps.
    #[serde(skip)]
    pub streams: Vec<(String, Stream)>,
}

impl GadgetReport {
    fn new(gadget: &str, case: Option<String>, parameters: Vec<(String, String)>) -> Self {
        GadgetReport {
            gadget: gadget.into(),
            case,
            parameters,
            links: Vec::new(),
            permutations: Vec::new(),
            status: Status::Undecided,
            streams: Vec::new(),
        }
    }

    /// Fails on any failing verified link, else undecided on any undecided one.
    fn finish(mut self) -> Self {
        let verified = self.links.iter().filter(|l| l.kind == LinkKind::Verified);
        let statuses: Vec<Status> = verified.map(|l| l.verdict.status).collect();
        self.status = if statuses.contains(&Status::Fails) {
            Status::Fails
        } else if statuses.iter().all(|s| *s == Status::Holds) {
            Status::Holds
        } else {
            Status::Undecided
        };
        self
    }

    pub fn link(&self, claim_prefix: &str) -> Option<&Link> {
        self.links
            .iter()
            .find(|l| l.claim.starts_with(claim_prefix))
    }

    pub fn permutation(&self, name: &str) -> Option<&FinitePermutation> {
        self.permutations
            .iter()
            .find(|p| p.name == name)
            .map(|p| &p.perm)
    }

    pub fn stream(&self, name: &str) -> Option<&Stream> {
        self.streams.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

/// `actual = claimed`: agreement past a bound below the horizon plus an exact scan up to it.
fn set_equality(actual: &IndexSet, claimed: &IndexSet, horizon: u64) -> RelationVerdict {
    let (a, c) = (
        actual.mask(horizon as usize),
        claimed.mask(horizon as usize),
    );
    if let Some(t) = (1..=horizon as usize).find(|&t| a[t] != c[t]) {
        return RelationVerdict::new(Status::Fails, horizon)
            .detail(format!("sets differ at t = {t}"));
    }
    let proved = (actual.subset_of(claimed) && claimed.subset_of(actual))
        || actual
            .finite_symdiff_bound(claimed)
            .is_some_and(|b| b <= BigUint::from(horizon));
    let status = if proved {
        Status::Holds
    } else {
        Status::Undecided
    };
    RelationVerdict::new(status, horizon).witness(Witness::StrictSet {
        set: claimed.to_string(),
    })
}

/// `part ⊆ whole`: structurally, or past a bound below the horizon plus an exact scan.
fn set_inclusion(part: &IndexSet, whole: &IndexSet, horizon: u64) -> RelationVerdict {
    let (p, w) = (part.mask(horizon as usize), whole.mask(horizon as usize));
    if let Some(t) = (1..=horizon as usize).find(|&t| p[t] && !w[t]) {
        return RelationVerdict::new(Status::Fails, horizon).detail(format!("t = {t} is missing"));
    }
    let proved = part.subset_of(whole)
        || IndexSet::diff(part.clone(), whole.clone()).is_empty() == Some(true);
    let status = if proved {
        Status::Holds
    } else {
        Status::Undecided
    };
    RelationVerdict::new(status, horizon)
}

/// Density exactly one.
fn density_one(set: &IndexSet, horizon: u64) -> RelationVerdict {
    let d = set.density();
    let status = match d.density() {
        Some(v) if *v == BigRational::from_integer(1.into()) => Status::Holds,
        Some(_) => Status::Fails,
        None => Status::Undecided,
    };
    let detail = d
        .density()
        .map(format_rational)
        .unwrap_or_else(|| "not exact".into());
    RelationVerdict::new(status, horizon)
        .densities(d)
        .detail(format!("d = {detail}"))
}

/// A permutation `π` of `[1, hi]`, identity below `lo`, with `moving_{π(t)}`
/// paired in sorted order against `fixed_t` on `[lo, hi]`. `above` asks for
/// `moving_{π(t)} ≥ fixed_t`, otherwise `≤`.
fn window_permutation(
    moving: &Stream,
    fixed: &Stream,
    lo: u64,
    hi: u64,
    above: bool,
) -> Result<FinitePermutation, String> {
    let (a, b) = (moving.prefix(hi), fixed.prefix(hi));
    let (wa, wb) = (&a[lo as usize - 1..], &b[lo as usize - 1..]);
    let ok = if above {
        sorted_window_dominates(wa, wb)
    } else {
        sorted_window_dominates(wb, wa)
    };
    if !ok {
        return Err(format!(
            "sorted window [{lo}, {hi}] has no dominating pairing"
        ));
    }
    let inner = pairing_permutation(wa, wb);
    let mut images: Vec<u64> = (1..lo).collect();
    images.extend(inner.images().iter().map(|&i| i + lo - 1));
    FinitePermutation::from_images(images).map_err(|e| e.to_string())
}

fn as_text<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn as_texts<T: std::fmt::Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn param(name: &str, value: impl ToString) -> (String, String) {
    (name.to_string(), value.to_string())
}
