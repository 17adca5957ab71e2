use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use super::*;
use crate::num::rational_from_u64;

fn b(n: u64) -> BigUint {
    BigUint::from(n)
}

fn set(text: &str) -> IndexSet {
    IndexSet::parse(text).unwrap()
}

/// Independent oracle: membership of each `t` written out from first principles.
fn brute_member(s: &IndexSet, t: u64) -> bool {
    match s {
        IndexSet::Finite(v) => v.iter().any(|e| *e == b(t)),
        IndexSet::ArithProg { start, step } => {
            let (a, d) = (start.to_u64_digits(), step.to_u64_digits());
            let (a, d) = (
                a.first().copied().unwrap_or(0),
                d.first().copied().unwrap_or(0),
            );
            t >= a && (t - a) % d == 0
        }
        IndexSet::Interval { lo, hi } => b(t) >= *lo && b(t) <= *hi,
        IndexSet::FactorialPoints(base) => {
            let mut f = 1u64;
            let mut k = 1u64;
            while f < t {
                k += 1;
                f *= k;
            }
            // 1 = 1! is reached with k = 1
            f == t && brute_member(base, k)
        }
        IndexSet::FactorialIntervals(FactorialFamily::Alternating(seq)) => {
            let idx = brute_indices(seq);
            idx.chunks(2)
                .filter(|c| c.len() == 2)
                .any(|c| t >= fact(c[0]) && t <= fact(c[1]))
        }
        IndexSet::FactorialIntervals(FactorialFamily::Cover(seq)) => {
            let idx = brute_indices(seq);
            let mut k = 0;
            while k + 2 < idx.len() {
                let (a, m, c) = (idx[k], idx[k + 1], idx[k + 2]);
                if t > fact(a) && t <= fact(c) - fact(c) / fact(m) {
                    return true;
                }
                k += 2;
            }
            false
        }
        IndexSet::Union(x, y) => brute_member(x, t) || brute_member(y, t),
        IndexSet::Inter(x, y) => brute_member(x, t) && brute_member(y, t),
        IndexSet::Compl(x) => !brute_member(x, t),
        IndexSet::Diff(x, y) => brute_member(x, t) && !brute_member(y, t),
        other => other.contains(t),
    }
}

fn fact(k: u64) -> u64 {
    (1..=k).product()
}

/// Sequence elements up to 20, enough for any block that starts below 20!.
fn brute_indices(seq: &IndexSet) -> Vec<u64> {
    (1..=20).filter(|&k| brute_member(seq, k)).collect()
}

fn brute_count(s: &IndexSet, n: u64) -> u64 {
    (1..=n).filter(|&t| brute_member(s, t)).count() as u64
}

#[test]
fn count_examples() {
    assert_eq!(set("ap(1,2)").count(&b(10)), b(5));
    assert_eq!(set("factorials(nat)").count(&b(720)), b(6));
    let s = set("union(ap(3,4), factorials(nat))");
    for n in [1u64, 7, 100, 5040] {
        assert_eq!(
            IndexSet::compl(s.clone()).count(&b(n)),
            b(n) - s.count(&b(n))
        );
    }
}

#[test]
fn member_examples() {
    assert!(set("factorials(nat)").contains(24));
    assert!(!set("ap(2,3)").contains(7));
    assert!(!set("diff(interval(1,10), finite{5})").contains(5));
}

#[test]
fn nth_element_examples() {
    assert_eq!(set("compl(factorials(nat))").nth(1).unwrap(), b(3));
    assert_eq!(set("ap(1,2)").nth(4).unwrap(), b(7));
    assert!(matches!(
        set("finite{2,9}").nth(3),
        Err(SetError::TooFewElements { .. })
    ));
    assert_eq!(
        set("factorials(nat)").nth(20).unwrap(),
        crate::num::factorial_u64(20)
    );
    assert_eq!(set("fcover(nat)").nth(3).unwrap(), b(7));
}

#[test]
fn next_after_walks_the_set() {
    let s = set("union(factorials(nat), ap(1000,7))");
    let mut t = BigUint::zero();
    let mut seen = Vec::new();
    while let Some(next) = s.next_after(&t) {
        if next > b(1100) {
            break;
        }
        seen.push(next.clone());
        t = next;
    }
    let expected: Vec<BigUint> = s.elements_upto(1100).into_iter().map(b).collect();
    assert_eq!(seen, expected);
}

#[test]
fn worked_density_examples() {
    let points = set("factorials(nat)");
    let d = points.density();
    assert!(d.exact);
    assert_eq!(d.density(), Some(&BigRational::zero()));
    let d = IndexSet::compl(points).density();
    assert_eq!(d.density(), Some(&BigRational::one()));
    let alt = set("falt(nat)").density();
    assert!(alt.exact);
    assert_eq!(alt.lower, DensityBound::Exact(BigRational::zero()));
    assert_eq!(alt.upper, DensityBound::Exact(BigRational::one()));
}

#[test]
fn progression_density_matches_counts() {
    for d in 1..=9u64 {
        for a in 1..=d {
            let s = IndexSet::arith_prog(a, d).unwrap();
            assert_eq!(s.density().density(), Some(&rational_from_u64(1, d)));
            let mut c = 0i128;
            for n in 1..=40_320u64 {
                if brute_member(&s, n) {
                    c += 1;
                }
                // |count/n - 1/d| <= d/n
                assert!(
                    (c * d as i128 - n as i128).abs() <= (d * d) as i128,
                    "a={a} d={d} n={n}"
                );
            }
        }
    }
}

#[test]
fn explicit_and_alternating_agree_on_prefix() {
    let explicit = set("fintervals[(1!, 2!); (3!, 4!); (5!, 6!); (7!, 8!)]");
    let alt = set("falt(nat)");
    assert_eq!(explicit.elements_upto(50_000), alt.elements_upto(50_000));
}

#[test]
fn union_of_parities_is_everything() {
    let d = set("union(ap(1,2), ap(2,2))").density();
    assert_eq!(d.density(), Some(&BigRational::one()));
}

#[test]
fn estimate_carries_schedule() {
    let s = set("inter(falt(nat), falt(ap(2,1)))");
    let d = s.density();
    if !d.exact {
        assert_eq!(d.evidence.len(), density::checkpoint_schedule(10).len());
    }
}

#[test]
fn finiteness_examples() {
    assert_eq!(set("finite{2,9}").finiteness(), Finiteness::Finite(b(9)));
    assert_eq!(set("ap(3,2)").finiteness(), Finiteness::Infinite);
    let evens_odds = set("inter(ap(1,2), ap(2,2))");
    assert!(evens_odds.finiteness().is_finite().unwrap());
    assert_eq!(evens_odds.is_empty(), Some(true));
    assert_eq!(set("compl(ap(5,1))").finiteness(), Finiteness::Finite(b(4)));
    assert_eq!(
        set("factorials(qge(1/3))").finiteness(),
        Finiteness::Infinite
    );
    assert_eq!(
        set("compl(factorials(nat))").cofiniteness(),
        Finiteness::Infinite
    );
    assert_eq!(
        set("compl(finite{1,2})").cofiniteness(),
        Finiteness::Finite(b(2))
    );
    assert_eq!(
        set("fcover(finite{1,2,3})").finiteness(),
        Finiteness::Finite(b(3))
    );
    assert_eq!(
        set("diff(factorials(nat), finite{1})").finiteness(),
        Finiteness::Infinite
    );
}

#[test]
fn sym_diff_examples() {
    let a = set("factorials(nat)");
    let with_hole = IndexSet::diff(a.clone(), set("finite{1}"));
    assert!(matches!(
        a.sym_diff_finite(&with_hole, 5040),
        SymDiffVerdict::Finite { .. }
    ));
    assert_eq!(
        set("ap(1,2)").sym_diff_finite(&set("ap(2,2)"), 5040),
        SymDiffVerdict::Infinite
    );
    let u = set("factorials(qge(1/3))");
    let u1 = u.nth(1).unwrap();
    let trimmed = IndexSet::diff(u.clone(), IndexSet::Finite(vec![u1]));
    assert!(matches!(
        u.sym_diff_finite(&trimmed, 5040),
        SymDiffVerdict::Finite { .. }
    ));
}

#[test]
fn cover_families_over_shifted_sequences() {
    // dropping two leading indices keeps the tail blocks aligned
    let a = set("fcover(nat)");
    let b2 = set("fcover(ap(3,1))");
    let bound = a.finite_symdiff_bound(&b2).expect("finite difference");
    let bound = bound.to_u64().unwrap();
    let probe = 200_000u64;
    let (ma, mb) = (a.mask(probe as usize), b2.mask(probe as usize));
    for t in (bound + 1)..=probe {
        assert_eq!(ma[t as usize], mb[t as usize], "t={t}");
    }
    // dropping one index shifts the pairing: no finite bound
    assert!(a.finite_symdiff_bound(&set("fcover(ap(2,1))")).is_none());
}

#[test]
fn subset_and_disjoint() {
    assert!(set("ap(4,4)").subset_of(&set("ap(2,2)")));
    assert!(set("factorials(finite{2,3})").subset_of(&set("factorials(nat)")));
    assert!(set("qge(2/3)").subset_of(&set("qge(1/3)")));
    assert!(set("ap(1,2)").disjoint_from(&set("ap(2,2)")));
    assert!(set("factorials(nat)").disjoint_from(&set("compl(factorials(nat))")));
    assert!(!set("ap(1,2)").subset_of(&set("ap(1,4)")));
}

fn leaf() -> impl Strategy<Value = IndexSet> {
    prop_oneof![
        prop::collection::btree_set(1u64..60, 0..6)
            .prop_map(|s| IndexSet::finite(s.into_iter().collect::<Vec<_>>()).unwrap()),
        (1u64..20, 1u64..7).prop_map(|(a, d)| IndexSet::arith_prog(a, d).unwrap()),
        (1u64..50, 0u64..80).prop_map(|(lo, w)| IndexSet::interval(lo, lo + w).unwrap()),
    ]
}

fn periodic_set() -> impl Strategy<Value = IndexSet> {
    leaf().prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, c)| IndexSet::union(a, c)),
            (inner.clone(), inner.clone()).prop_map(|(a, c)| IndexSet::inter(a, c)),
            (inner.clone(), inner.clone()).prop_map(|(a, c)| IndexSet::diff(a, c)),
            inner.prop_map(IndexSet::compl),
        ]
    })
}

fn mixed_set() -> impl Strategy<Value = IndexSet> {
    let base = prop_oneof![
        leaf(),
        leaf().prop_map(IndexSet::factorial_points),
        Just(IndexSet::alternating_blocks(IndexSet::naturals())),
        Just(IndexSet::cover_blocks(IndexSet::naturals())),
        (1u64..5).prop_map(|a| IndexSet::cover_blocks(IndexSet::arith_prog(a, 1u32).unwrap())),
    ];
    base.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, c)| IndexSet::union(a, c)),
            (inner.clone(), inner.clone()).prop_map(|(a, c)| IndexSet::inter(a, c)),
            (inner.clone(), inner.clone()).prop_map(|(a, c)| IndexSet::diff(a, c)),
            inner.prop_map(IndexSet::compl),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structural_count_matches_membership(s in mixed_set(), n in 1u64..1500) {
        prop_assert_eq!(s.count(&b(n)), b(brute_count(&s, n)));
    }

    #[test]
    fn mask_matches_membership(s in mixed_set()) {
        let mask = s.mask(800);
        for t in 1..=800u64 {
            prop_assert_eq!(mask[t as usize], brute_member(&s, t));
        }
    }

    #[test]
    fn exact_densities_are_ordered_and_complement(s in mixed_set()) {
        let d = s.density();
        prop_assert!(d.lower.lo() <= d.upper.hi());
        prop_assert!(d.lower.lo() >= &BigRational::zero() && d.upper.hi() <= &BigRational::one());
        if let (Some(lo), Some(hi)) = (d.lower.exact(), d.upper.exact()) {
            prop_assert!(lo <= hi);
        }
        let c = IndexSet::compl(s.clone()).density();
        if let (Some(lc), Some(us)) = (c.lower.exact(), d.upper.exact()) {
            prop_assert_eq!(lc.clone(), BigRational::one() - us);
        }
    }

    #[test]
    fn periodic_density_matches_period_ratio(s in periodic_set()) {
        let d = s.density();
        prop_assert!(d.exact);
        let q = d.density().cloned().expect("periodic sets have a density");
        let p = s.periodic().unwrap();
        // count over many periods past the threshold is exactly proportional
        let t = p.threshold.to_u64().unwrap();
        let per = p.period.to_u64().unwrap();
        let span = per * 7;
        let hits = brute_count(&s, t + span) - brute_count(&s, t);
        prop_assert_eq!(rational_from_u64(hits, span), q);
    }

    #[test]
    fn finiteness_is_sound(s in mixed_set()) {
        match s.finiteness() {
            Finiteness::Finite(bound) => {
                let bound = bound.to_u64().unwrap_or(u64::MAX).min(1 << 20);
                let probe = (bound + 2000).min(60_000);
                let mask = s.mask(probe as usize);
                for t in (bound + 1)..=probe {
                    prop_assert!(!mask[t as usize]);
                }
            }
            Finiteness::Infinite => {
                // any proven-infinite set has an element beyond every scanned point
                let last = s.nth_element(&(s.count(&b(5000)) + 1u32));
                prop_assert!(last.is_ok());
            }
            Finiteness::Unknown => {}
        }
    }

    #[test]
    fn structural_symdiff_preserves_densities(s in mixed_set(), extra in prop::collection::btree_set(1u64..100, 0..4)) {
        let f = IndexSet::finite(extra.into_iter().collect::<Vec<_>>()).unwrap();
        let t = IndexSet::union(IndexSet::diff(s.clone(), f.clone()), f);
        prop_assert!(s.finite_symdiff_bound(&t).is_some());
        let (ds, dt) = (s.density(), t.density());
        if ds.exact && dt.exact {
            prop_assert_eq!(ds.lower, dt.lower);
            prop_assert_eq!(ds.upper, dt.upper);
        }
    }

    #[test]
    fn subset_and_disjoint_are_sound(a in mixed_set(), c in mixed_set()) {
        let (ma, mc) = (a.mask(3000), c.mask(3000));
        if a.subset_of(&c) {
            for t in 1..=3000usize {
                prop_assert!(!ma[t] || mc[t]);
            }
        }
        if a.disjoint_from(&c) {
            for t in 1..=3000usize {
                prop_assert!(!(ma[t] && mc[t]));
            }
        }
    }

    #[test]
    fn display_round_trips(s in mixed_set()) {
        prop_assert_eq!(IndexSet::parse(&s.to_string()).unwrap(), s);
    }
}

#[test]
fn eventual_agreement_examples() {
    let u = set("factorials(nat)");
    let z = set("diff(factorials(nat), finite{1})");
    let claimed = set("union(finite{1}, diff(compl(factorials(nat)), interval(1,1)))");
    let gt = IndexSet::inter(IndexSet::compl(z.clone()), IndexSet::compl(u.clone()));
    let gt = IndexSet::union(gt, IndexSet::inter(IndexSet::compl(z), u));
    assert!(gt.eventually_equal(&claimed).is_some());
    let blocks = set("fcover(nat)");
    let shifted = set("fcover(diff(nat, finite{1,2}))");
    let stray = IndexSet::inter(IndexSet::compl(blocks.clone()), shifted.clone());
    assert!(matches!(stray.finiteness(), Finiteness::Finite(_)));
    assert_eq!(stray.is_empty(), Some(true));
    assert!(shifted.eventually_subset(&blocks).is_some());
    assert!(blocks.eventually_subset(&shifted).is_some());
    assert_eq!(
        set("factorials(nat)").eventually_equal(&set("ap(2,2)")),
        None
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn eventual_agreement_is_sound(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = crate::corpus::index_set(&mut rng, 2);
        let b = match seed % 3 {
            0 => IndexSet::union(a.clone(), crate::corpus::periodic_leaf(&mut rng)),
            1 => IndexSet::diff(a.clone(), IndexSet::finite([seed % 50 + 1]).unwrap()),
            _ => crate::corpus::index_set(&mut rng, 2),
        };
        let n = 3000usize;
        let (ma, mb) = (a.mask(n), b.mask(n));
        if let Some(bound) = a.eventually_equal(&b) {
            let start = bound.to_usize().unwrap_or(n).min(n) + 1;
            prop_assert!((start..=n).all(|t| ma[t] == mb[t]), "{} vs {} past {}", a, b, bound);
        }
        if let Some(bound) = a.eventually_subset(&b) {
            let start = bound.to_usize().unwrap_or(n).min(n) + 1;
            prop_assert!((start..=n).all(|t| !ma[t] || mb[t]), "{} in {} past {}", a, b, bound);
        }
        if let Finiteness::Finite(bound) = a.finiteness() {
            let start = bound.to_usize().unwrap_or(n).min(n) + 1;
            prop_assert!((start..=n).all(|t| !ma[t]));
        }
    }
}

#[test]
fn threshold_mask_matches_pointwise_membership() {
    for (p, q) in [(1, 2), (1, 3), (2, 3), (5, 6), (3, 7), (1, 100)] {
        let s = IndexSet::enum_threshold(rational_from_u64(p, q));
        let mask = s.mask(5000);
        for t in 1..=5000u64 {
            assert_eq!(mask[t as usize], s.member(&b(t)), "qge({p}/{q}) at {t}");
        }
    }
}

#[test]
fn swept_evidence_matches_structural_counts() {
    let s = set("inter(qge(1/2), ap(6,6))");
    for c in s.checkpoint_evidence(7) {
        assert_eq!(BigUint::from(c.count), s.count(&b(c.n)), "n = {}", c.n);
    }
}
