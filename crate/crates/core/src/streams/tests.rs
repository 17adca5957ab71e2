use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;

use super::*;

fn s(text: &str) -> Stream {
    Stream::parse(text).unwrap()
}

fn ints(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| int(x)).collect()
}

#[test]
fn explicit_base_rank_fill_prefixes() {
    let x = s("rankfill(factorials(finite{1,2,3,4,7}))");
    assert_eq!(x.prefix(7), ints(&[1, 1, 2, 3, 4, 1, 5]));
    let z = s("rankfill(diff(factorials(finite{1,2,3,4,7}), finite{1}))");
    assert_eq!(z.prefix(7), ints(&[2, 1, 3, 4, 5, 1, 6]));
    for t in 1..=7u64 {
        assert_eq!(x.eval(&nat(t)).unwrap(), x.prefix(7)[t as usize - 1]);
    }
}

#[test]
fn simple_prefixes() {
    assert_eq!(s("const(0)").prefix(3), ints(&[0, 0, 0]));
    assert_eq!(
        s("piecewise(default=0; ap(2,2):1)").prefix(4),
        ints(&[0, 1, 0, 1])
    );
    let x = s("rankfill(compl(fcover(nat)))");
    assert_eq!(x.prefix(7), ints(&[1, 2, 3, 1, 1, 1, 4]));
    assert_eq!(x.at(115), int(112));
    assert_eq!(x.at(116), int(1));
}

#[test]
fn swap_twice_is_identity() {
    let x = s("rankfill(factorials(nat))");
    let p = FinitePermutation::swap(10, 2, 7).unwrap();
    let y = x.apply_permutation(&p).apply_permutation(&p);
    assert_eq!(y.prefix(200), x.prefix(200));
    let id = FinitePermutation::identity(12);
    assert_eq!(x.apply_permutation(&id).prefix(50), x.prefix(50));
}

#[test]
fn strict_set_examples() {
    let gt = match strict_set(&s("const(1)"), &s("const(0)"), 100) {
        StrictSet::Exact(g) => g,
        other => panic!("{other:?}"),
    };
    assert_eq!(
        gt.cofiniteness(),
        crate::setalg::Finiteness::Finite(BigUint::from(0u32))
    );
    let x = s("rankfill(factorials(nat))");
    match strict_set(&x, &x, 100) {
        StrictSet::Exact(g) => assert_eq!(g.is_empty(), Some(true)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn rank_fill_against_shifted_fill() {
    // z(r) vs x(r) for the explicit base: strict exactly on the gaps past 1 plus the point 1
    let x = s("rankfill(factorials(finite{1,2,3,4,7}))");
    let z = s("rankfill(diff(factorials(finite{1,2,3,4,7}), finite{1}))");
    let c = compare(&z, &x, 5040).unwrap();
    assert_eq!(c.lt.is_empty(), Some(true));
    for t in 1..=6000u64 {
        let expected = z.at(t) > x.at(t);
        assert_eq!(c.gt.contains(t), expected, "t={t}");
    }
}

fn stream_strategy() -> impl Strategy<Value = Stream> {
    let set = prop_oneof![
        (1u64..6, 1u64..5).prop_map(|(a, d)| IndexSet::arith_prog(a, d).unwrap()),
        prop::collection::btree_set(1u64..40, 1..5)
            .prop_map(|v| IndexSet::finite(v.into_iter().collect::<Vec<_>>()).unwrap()),
        Just(IndexSet::factorial_points(IndexSet::naturals())),
        Just(IndexSet::alternating_blocks(IndexSet::naturals())),
        (1u64..40, 0u64..30).prop_map(|(a, w)| IndexSet::interval(a, a + w).unwrap()),
    ];
    let fill = prop_oneof![
        Just(IndexSet::factorial_points(IndexSet::naturals())),
        Just(IndexSet::compl(
            IndexSet::cover_blocks(IndexSet::naturals())
        )),
        Just(IndexSet::arith_prog(2u32, 2u32).unwrap()),
        Just(IndexSet::diff(
            IndexSet::factorial_points(IndexSet::naturals()),
            IndexSet::finite([1u32]).unwrap()
        )),
        Just(IndexSet::union(
            IndexSet::factorial_points(IndexSet::naturals()),
            IndexSet::finite([3u32, 5]).unwrap()
        )),
    ];
    let piecewise =
        (0i64..4, prop::collection::vec((set, 0i64..4), 0..3)).prop_map(|(d, clauses)| {
            let mut earlier: Vec<IndexSet> = Vec::new();
            let mut out = Vec::new();
            for (set, v) in clauses {
                let region = if earlier.is_empty() {
                    set.clone()
                } else {
                    IndexSet::diff(set.clone(), IndexSet::union_all(earlier.clone()))
                };
                earlier.push(set);
                out.push((region, int(v)));
            }
            Stream::piecewise(int(d), out, 2000).unwrap()
        });
    let rank = (fill, 1i64..3).prop_map(|(u, f)| Stream::rank_fill(u, int(f)).unwrap());
    let base = prop_oneof![piecewise, rank];
    (
        base,
        prop::option::of(Just((1..=8u64).collect::<Vec<_>>()).prop_shuffle()),
    )
        .prop_map(|(b, p)| match p {
            Some(images) => Stream::permuted(b, FinitePermutation::from_images(images).unwrap()),
            None => b,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prefix_agrees_with_eval(x in stream_strategy()) {
        let p = x.prefix(300);
        for t in 1..=300u64 {
            prop_assert_eq!(&x.at(t), &p[t as usize - 1]);
        }
    }

    #[test]
    fn rank_fill_structure(u in prop_oneof![
        Just(IndexSet::factorial_points(IndexSet::naturals())),
        Just(IndexSet::arith_prog(3u32, 3u32).unwrap()),
        Just(IndexSet::compl(IndexSet::cover_blocks(IndexSet::naturals()))),
    ], fill in 1i64..4) {
        let x = Stream::rank_fill(u.clone(), int(fill)).unwrap();
        let gaps = IndexSet::compl(u.clone());
        for m in 1..=200u64 {
            let t = gaps.nth(m).unwrap();
            prop_assert_eq!(x.eval(&t).unwrap(), int(m as i64 + 1));
        }
        for t in u.elements_upto(500) {
            prop_assert_eq!(x.at(t), int(fill));
        }
    }

    #[test]
    fn permutation_preserves_window_multiset(x in stream_strategy(), images in Just((1..=10u64).collect::<Vec<_>>()).prop_shuffle()) {
        let p = FinitePermutation::from_images(images).unwrap();
        let y = x.apply_permutation(&p);
        let (mut a, mut b) = (x.prefix(10), y.prefix(10));
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        prop_assert_eq!(x.prefix(400)[10..].to_vec(), y.prefix(400)[10..].to_vec());
        for t in 1..=10u64 {
            prop_assert_eq!(y.at(t), x.at(p.apply(t)));
        }
    }

    #[test]
    fn comparison_partitions_match_pointwise_scan(x in stream_strategy(), y in stream_strategy()) {
        if let Ok(c) = compare(&x, &y, 5040) {
            let n = 6000u64;
            let (px, py) = (x.prefix(n), y.prefix(n));
            let (mg, me, ml) = (c.gt.mask(n as usize), c.eq.mask(n as usize), c.lt.mask(n as usize));
            for t in 1..=n as usize {
                let ord = px[t - 1].cmp(&py[t - 1]);
                prop_assert_eq!(mg[t], ord == std::cmp::Ordering::Greater, "gt t={}", t);
                prop_assert_eq!(me[t], ord == std::cmp::Ordering::Equal, "eq t={}", t);
                prop_assert_eq!(ml[t], ord == std::cmp::Ordering::Less, "lt t={}", t);
            }
        }
    }

    #[test]
    fn strict_sets_are_disjoint(x in stream_strategy(), y in stream_strategy()) {
        if let (StrictSet::Exact(a), StrictSet::Exact(b)) = (strict_set(&x, &y, 5040), strict_set(&y, &x, 5040)) {
            let (ma, mb) = (a.mask(3000), b.mask(3000));
            for t in 1..=3000usize {
                prop_assert!(!(ma[t] && mb[t]));
            }
        }
    }

    #[test]
    fn dsl_round_trips(x in stream_strategy()) {
        prop_assert_eq!(Stream::parse(&x.to_string()).unwrap(), x);
    }
}
