//! The threshold gadget: `U(r)` collects the factorials of the indices whose
//! enumerated rational is at least `r`; `x(r)` and `z(r)` rank-fill its gaps.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{
    density_one, param, set_equality, set_inclusion, GadgetError, GadgetReport, Link,
    PermutationRecord,
};
use crate::axioms::{anonymity_equivalent, density_one_dominates, weakly_dominates, Status};
use crate::num::{factorial, format_rational};
use crate::setalg::IndexSet;
use crate::streams::{int, FinitePermutation, Stream};

/// Index points listed in reports.
const LISTED: u64 = 8;
/// Largest `u_1` for which the case-(b) permutation is materialized.
const PERMUTATION_LIMIT: u64 = 1 << 22;

#[derive(Clone, Debug)]
pub struct Lemma1Gadget {
    pub label: String,
    /// `{u_k}`: the indices whose factorials form `U`.
    pub base: IndexSet,
    /// `U = {(u_k)!}`.
    pub upper: IndexSet,
    /// `x`: 1 on `U`, `m + 1` at the `m`-th element of `L = ℕ \ U`.
    pub x: Stream,
    /// `z`: rank fill over `U \ {(u_1)!}`.
    pub z: Stream,
    /// `(u_1)!`.
    pub first_point: BigUint,
}

impl Lemma1Gadget {
    /// The first `k` indices `u_1, ..., u_k` (fewer when the base is finite).
    pub fn indices(&self, k: u64) -> Vec<BigUint> {
        (1..=k).map_while(|i| self.base.nth(i).ok()).collect()
    }

    fn gaps(&self) -> IndexSet {
        IndexSet::compl(self.upper.clone())
    }

    fn z_fill(&self) -> IndexSet {
        IndexSet::diff(self.upper.clone(), point(&self.first_point))
    }
}

fn point(t: &BigUint) -> IndexSet {
    IndexSet::finite([t.clone()]).expect("a single point")
}

/// The gadget for a threshold `r ∈ (0, 1)`.
pub fn lemma1_build(r: &BigRational) -> Result<Lemma1Gadget, GadgetError> {
    if *r <= BigRational::zero() || *r >= BigRational::one() {
        return Err(GadgetError::Threshold(format_rational(r)));
    }
    lemma1_from_base(
        IndexSet::enum_threshold(r.clone()),
        format!("r = {}", format_rational(r)),
    )
}

/// The gadget over an explicit index base `{u_k}`.
pub fn lemma1_from_base(base: IndexSet, label: String) -> Result<Lemma1Gadget, GadgetError> {
    let u1 = base.nth(1).map_err(|_| GadgetError::TooFewPoints)?;
    let first_point = factorial(&u1);
    let upper = IndexSet::factorial_points(base.clone());
    let x = Stream::rank_fill(upper.clone(), int(1))
        .expect("factorial points leave infinitely many gaps");
    let z_fill = IndexSet::diff(upper.clone(), point(&first_point));
    let z = Stream::rank_fill(z_fill, int(1))
        .expect("a subset of factorial points leaves infinitely many gaps");
    Ok(Lemma1Gadget {
        label,
        base,
        upper,
        x,
        z,
        first_point,
    })
}

fn listed(g: &Lemma1Gadget) -> String {
    let v: Vec<String> = g.indices(LISTED).iter().map(|u| u.to_string()).collect();
    v.join(",")
}

/// `z(r) ≻ x(r)` under density-one Pareto: `z ≥ x`, strict exactly on
/// `{(u_1)!} ∪ S` with `S` the gaps of `U` past `(u_1)!`, and `d(S) = 1`.
pub fn lemma1_verify_p1ea(g: &Lemma1Gadget, horizon: u64) -> GadgetReport {
    let mut report = GadgetReport::new(
        "lemma1",
        None,
        vec![
            param("base", &g.label),
            param("u", listed(g)),
            param("first_point", &g.first_point),
        ],
    );
    report.streams = vec![("x".into(), g.x.clone()), ("z".into(), g.z.clone())];
    let h = horizon;
    if BigUint::from(h) < g.first_point {
        report.links.push(Link::undecided(
            "z ≻ x under density-one Pareto",
            h,
            format!(
                "no strict coordinate seen: horizon is below (u_1)! = {}",
                g.first_point
            ),
        ));
        return report.finish();
    }
    let weak = weakly_dominates(&g.z, &g.x, h);
    report
        .links
        .push(Link::verified("z ≥ x at every coordinate", weak));
    let tail = IndexSet::diff(g.gaps(), IndexSet::initial_segment(&g.first_point));
    let claimed = IndexSet::union(point(&g.first_point), tail.clone());
    match crate::streams::compare(&g.z, &g.x, h) {
        Ok(c) => report.links.push(Link::verified(
            "strict set equals {(u_1)!} ∪ S",
            set_equality(&c.gt, &claimed, h),
        )),
        Err(e) => report.links.push(Link::undecided(
            "strict set equals {(u_1)!} ∪ S",
            h,
            format!("{e:?}"),
        )),
    }
    report
        .links
        .push(Link::verified("d(S) = 1", density_one(&tail, h)));
    report.links.push(Link::verified(
        "z ≻ x under density-one Pareto",
        density_one_dominates(&g.z, &g.x, h),
    ));
    report.finish()
}

/// Compares `x(s)` with `z(r)` for `r < s`: directly when `u_1 = (u_1(r))!`
/// (case a), else through a permutation of `z(r)` (case b). Here `u_1 < u_2`
/// are the two least elements of `U(r) \ U(s)`.
pub fn lemma1_case_compare(
    gr: &Lemma1Gadget,
    gs: &Lemma1Gadget,
    horizon: u64,
) -> Result<GadgetReport, GadgetError> {
    let h = horizon;
    let nested = gs.base.subset_of(&gr.base)
        || IndexSet::diff(gs.base.clone(), gr.base.clone()).is_empty() == Some(true);
    if !nested {
        return Err(GadgetError::NotNested);
    }
    let diff = IndexSet::diff(gr.base.clone(), gs.base.clone());
    let (i1, i2) = match (diff.nth(1), diff.nth(2)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Err(GadgetError::TooFewPoints),
    };
    let (u1, u2) = (factorial(&i1), factorial(&i2));
    let case_a = u1 == gr.first_point;
    let mut report = GadgetReport::new(
        "lemma1",
        Some(if case_a { "a" } else { "b" }.into()),
        vec![
            param("r", &gr.label),
            param("s", &gs.label),
            param("first_point_r", &gr.first_point),
            param("u1", &u1),
            param("u2", &u2),
        ],
    );
    report.streams = vec![("x_s".into(), gs.x.clone()), ("z_r".into(), gr.z.clone())];
    report.links.push(Link::check(
        "U(s) ⊆ U(r)",
        true,
        h,
        "index bases are nested",
    ));
    let u2_small = u2.to_u64().filter(|&v| v <= h);
    let target = if case_a {
        gr.z.clone()
    } else {
        let Some(b) = u1.to_u64().filter(|&b| b <= PERMUTATION_LIMIT && b <= h) else {
            report.links.push(Link::undecided(
                "x(s) ≻ z^π under density-one Pareto",
                h,
                format!("u_1 = {u1} is beyond the horizon"),
            ));
            return Ok(report.finish());
        };
        let first = gr.first_point.to_u64().expect("first point is below u_1");
        let fails = weakly_dominates(&gs.x, &gr.z, h);
        let witness_ok = fails.status == Status::Fails
            && first_below(&fails).is_some_and(|t| t >= first && t < b);
        report.links.push(Link::check(
            "x(s) ≱ z(r), with a witness in [(u_1(r))!, u_1)",
            witness_ok,
            h,
            format!("{:?}", fails.witness),
        ));
        let perm = shift_permutation(gr, first, b);
        let zp = gr.z.apply_permutation(&perm);
        let moved_inside = perm.moved().iter().all(|&(t, _)| t >= first && t <= b);
        report.links.push(Link::check(
            "π is a bijection of [(u_1(r))!, u_1] fixing every other point",
            moved_inside,
            h,
            format!("{} points moved", perm.moved().len()),
        ));
        report.links.push(Link::check(
            "z^π at (u_1(r))! equals z(r) at u_1, which is 1",
            zp.at(first) == gr.z.at(b) && gr.z.at(b) == int(1),
            h,
            format!("z^π = {}", zp.at(first)),
        ));
        let kept = ((first + 1)..b)
            .filter(|&t| gr.upper.contains(t))
            .all(|t| zp.at(t) == gr.z.at(t));
        report.links.push(Link::check(
            "z^π = z(r) on ((u_1(r))!, u_1) ∩ U(r)",
            kept,
            h,
            "scanned",
        ));
        let same = anonymity_equivalent(&zp, &gr.z, h);
        report.links.push(Link::check(
            "z^π ∼ z(r) under anonymity",
            same == Some(true),
            h,
            format!("{same:?}"),
        ));
        report.permutations.push(PermutationRecord {
            name: "pi".into(),
            bound: perm.bound(),
            moved: perm.moved().len(),
            perm,
        });
        report.streams.push(("z_pi".into(), zp.clone()));
        zp
    };
    let name = if case_a { "z(r)" } else { "z^π" };
    report.links.push(Link::verified(
        format!("x(s) ≥ {name}"),
        weakly_dominates(&gs.x, &target, h),
    ));
    match u2_small {
        Some(t) => {
            let (a, b) = (gs.x.at(t), target.at(t));
            report.links.push(Link::check(
                format!("x(s) at u_2 exceeds {name} at u_2, which is 1"),
                a > b && b == int(1),
                h,
                format!("{} > {}", format_rational(&a), format_rational(&b)),
            ));
        }
        None => report.links.push(Link::undecided(
            format!("x(s) at u_2 exceeds {name} at u_2, which is 1"),
            h,
            format!("u_2 = {u2} is beyond the horizon"),
        )),
    }
    let later = IndexSet::diff(gs.gaps(), IndexSet::initial_segment(&u2));
    report.links.push(Link::verified(
        "d({t ∈ L(s) : t > u_2}) = 1",
        density_one(&later, h),
    ));
    match crate::streams::compare(&gs.x, &target, h) {
        Ok(c) => {
            let part = IndexSet::union(point(&u2), later);
            report.links.push(Link::verified(
                "{u_2} ∪ {t ∈ L(s) : t > u_2} ⊆ strict set",
                set_inclusion(&part, &c.gt, h),
            ));
        }
        Err(e) => report.links.push(Link::undecided(
            "{u_2} ∪ {t ∈ L(s) : t > u_2} ⊆ strict set",
            h,
            format!("{e:?}"),
        )),
    }
    report.links.push(Link::verified(
        format!("x(s) ≻ {name} under density-one Pareto"),
        density_one_dominates(&gs.x, &target, h),
    ));
    Ok(report.finish())
}

fn first_below(v: &crate::axioms::RelationVerdict) -> Option<u64> {
    match &v.witness {
        Some(crate::axioms::Witness::Coordinate { t, .. }) => t.parse().ok(),
        _ => None,
    }
}

/// On the points `a_0 = (u_1(r))! < a_1 < ... < a_k = u_1` of `[(u_1(r))!, u_1]`
/// where `z(r)` takes rank values, plus `u_1`: `π(a_0) = u_1`, `π(a_j) = a_{j−1}`.
fn shift_permutation(g: &Lemma1Gadget, first: u64, u1: u64) -> FinitePermutation {
    let fill = g.z_fill();
    let points: Vec<u64> = (first..=u1)
        .filter(|&t| t == u1 || !fill.contains(t))
        .collect();
    let mut images: Vec<u64> = (1..=u1).collect();
    for (j, &t) in points.iter().enumerate() {
        let image = if j == 0 { u1 } else { points[j - 1] };
        images[t as usize - 1] = image;
    }
    FinitePermutation::from_images(images).expect("a cyclic shift is a bijection")
}

/// [`lemma1_case_compare`] for thresholds `r < s`.
pub fn lemma1_compare_thresholds(
    r: &BigRational,
    s: &BigRational,
    horizon: u64,
) -> Result<GadgetReport, GadgetError> {
    if r >= s {
        return Err(GadgetError::Order {
            r: format_rational(r),
            s: format_rational(s),
        });
    }
    lemma1_case_compare(&lemma1_build(r)?, &lemma1_build(s)?, horizon)
}
