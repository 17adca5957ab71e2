//! Seeded random generators for sets, streams and stream pairs.
//!
//! Every generator draws from a caller-supplied RNG, so a fixed seed reproduces the
//! same corpus.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::setalg::IndexSet;
use crate::streams::{int, FinitePermutation, Stream};

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn finite<R: Rng>(rng: &mut R, max: u64, len: usize) -> IndexSet {
    let mut v: Vec<u64> = (0..rng.gen_range(0..=len))
        .map(|_| rng.gen_range(1..=max))
        .collect();
    v.sort_unstable();
    v.dedup();
    IndexSet::finite(v).expect("sorted and deduplicated")
}

fn progression<R: Rng>(rng: &mut R) -> IndexSet {
    let d = rng.gen_range(1..=6u64);
    IndexSet::arith_prog(rng.gen_range(1..=d + 3), d).expect("positive start and step")
}

/// A leaf whose membership is eventually periodic.
pub fn periodic_leaf<R: Rng>(rng: &mut R) -> IndexSet {
    match rng.gen_range(0..3) {
        0 => finite(rng, 60, 5),
        1 => progression(rng),
        _ => {
            let lo = rng.gen_range(1..=50u64);
            IndexSet::interval(lo, lo + rng.gen_range(0..=80)).expect("lo <= hi")
        }
    }
}

fn sequence<R: Rng>(rng: &mut R) -> IndexSet {
    match rng.gen_range(0..4) {
        0 => IndexSet::naturals(),
        1 => IndexSet::arith_prog(rng.gen_range(1..=3u64), 1u32).expect("valid"),
        2 => IndexSet::arith_prog(1u32, 2u32).expect("valid"),
        _ => IndexSet::finite(vec![1u64, 2, 3, 4, 7]).expect("valid"),
    }
}

/// A leaf from any primitive family.
pub fn leaf<R: Rng>(rng: &mut R) -> IndexSet {
    match rng.gen_range(0..9) {
        0..=2 => periodic_leaf(rng),
        3 | 4 => IndexSet::factorial_points(sequence(rng)),
        5 => IndexSet::alternating_blocks(sequence(rng)),
        6 => IndexSet::cover_blocks(sequence(rng)),
        7 => {
            let d = rng.gen_range(2..=6i64);
            IndexSet::enum_threshold(q(rng.gen_range(1..d), d))
        }
        _ => IndexSet::factorial_points(IndexSet::enum_threshold(q(1, 3))),
    }
}

fn combine<R: Rng>(rng: &mut R, depth: u32, leaf_fn: fn(&mut R) -> IndexSet) -> IndexSet {
    if depth == 0 || rng.gen_bool(0.35) {
        return leaf_fn(rng);
    }
    let a = combine(rng, depth - 1, leaf_fn);
    match rng.gen_range(0..4) {
        0 => IndexSet::union(a, combine(rng, depth - 1, leaf_fn)),
        1 => IndexSet::inter(a, combine(rng, depth - 1, leaf_fn)),
        2 => IndexSet::diff(a, combine(rng, depth - 1, leaf_fn)),
        _ => IndexSet::compl(a),
    }
}

/// A boolean combination of up to `2^depth` leaves from every family.
pub fn index_set<R: Rng>(rng: &mut R, depth: u32) -> IndexSet {
    combine(rng, depth, leaf)
}

/// A boolean combination of eventually periodic leaves.
pub fn periodic_set<R: Rng>(rng: &mut R, depth: u32) -> IndexSet {
    combine(rng, depth, periodic_leaf)
}

fn small_value<R: Rng>(rng: &mut R) -> BigRational {
    match rng.gen_range(0..6) {
        0 => q(1, 2),
        1 => q(-1, 1),
        n => int(n as i64 - 2),
    }
}

/// Pairwise disjoint regions `A_1, A_2 \ A_1, ...`.
fn regions<R: Rng>(rng: &mut R, k: usize, periodic: bool) -> Vec<IndexSet> {
    let mut earlier: Vec<IndexSet> = Vec::new();
    let mut out = Vec::new();
    for _ in 0..k {
        let set = if periodic {
            periodic_set(rng, 1)
        } else {
            index_set(rng, 1)
        };
        let region = if earlier.is_empty() {
            set.clone()
        } else {
            IndexSet::diff(set.clone(), IndexSet::union_all(earlier.clone()))
        };
        earlier.push(set);
        out.push(region);
    }
    out
}

fn piecewise(default: BigRational, clauses: Vec<(IndexSet, BigRational)>) -> Stream {
    Stream::Piecewise { default, clauses }
}

/// A piecewise stream over eventually periodic regions with values in `{0, 1, 2, 3}`.
pub fn periodic_stream<R: Rng>(rng: &mut R) -> Stream {
    let k = rng.gen_range(0..=3);
    let clauses = regions(rng, k, true)
        .into_iter()
        .map(|r| (r, int(rng.gen_range(0..4))))
        .collect();
    piecewise(int(rng.gen_range(0..4)), clauses)
}

/// `y` raised by 1 on a cofinite region, which is the only shape an eventually
/// periodic density-one set can take.
pub fn density_one_improvement<R: Rng>(rng: &mut R, y: &Stream) -> Stream {
    let holes = finite(rng, 40, 4);
    let Stream::Piecewise { default, clauses } = y else {
        panic!("improvements are built over piecewise streams");
    };
    // split every region of y into its part inside and outside the holes
    let mut out: Vec<(IndexSet, BigRational)> = Vec::new();
    for (set, v) in clauses {
        out.push((IndexSet::inter(set.clone(), holes.clone()), v.clone()));
    }
    for (set, v) in clauses {
        out.push((IndexSet::diff(set.clone(), holes.clone()), v + int(1)));
    }
    out.push((holes, default.clone()));
    piecewise(default + int(1), out)
}

const RANK_BASES: usize = 7;

/// Fill sets with an infinite complement.
pub fn rank_base<R: Rng>(rng: &mut R) -> IndexSet {
    match rng.gen_range(0..RANK_BASES) {
        0 => IndexSet::factorial_points(IndexSet::naturals()),
        1 => IndexSet::factorial_points(IndexSet::enum_threshold(q(1, 3))),
        2 => IndexSet::compl(IndexSet::cover_blocks(IndexSet::naturals())),
        3 => IndexSet::arith_prog(2u32, 2u32).expect("valid"),
        4 => IndexSet::factorial_points(IndexSet::arith_prog(1u32, 2u32).expect("valid")),
        5 => IndexSet::alternating_blocks(IndexSet::naturals()),
        _ => IndexSet::factorial_points(IndexSet::finite(vec![1u64, 2, 3, 4, 7]).expect("valid")),
    }
}

/// A pair `(x, y)` drawn from shapes where the dominance predicates are informative.
pub fn dominance_pair<R: Rng>(rng: &mut R) -> (Stream, Stream) {
    let (x, y) = match rng.gen_range(0..5) {
        // common partition, x raised on some regions
        0 | 1 => {
            let k = rng.gen_range(0..=3);
            let periodic = rng.gen_bool(0.5);
            let regs = regions(rng, k, periodic);
            let base = small_value(rng);
            let lift = |rng: &mut R| match rng.gen_range(0..8) {
                0..=2 => int(0),
                3 | 4 => int(1),
                5 => q(1, 2),
                6 => int(2),
                _ => int(-1),
            };
            let d0 = lift(rng);
            let mut xc = Vec::new();
            let mut yc = Vec::new();
            for r in regs {
                let w = small_value(rng);
                xc.push((r.clone(), &w + lift(rng)));
                yc.push((r, w));
            }
            (piecewise(&base + d0, xc), piecewise(base, yc))
        }
        // rank fills over nested bases
        2 => {
            let u = rank_base(rng);
            let extra = finite(rng, 30, 3);
            let smaller = IndexSet::diff(u.clone(), extra.clone());
            let larger = IndexSet::union(u.clone(), extra);
            match rng.gen_range(0..3) {
                0 => (rank(smaller), rank(u)),
                1 => (rank(u), rank(larger)),
                _ => (rank(u.clone()), rank(u)),
            }
        }
        // rank fill against a small piecewise stream
        3 => {
            let u = rank_base(rng);
            let k = rng.gen_range(0..=2);
            let clauses = regions(rng, k, true)
                .into_iter()
                .map(|r| (r, int(rng.gen_range(0..3))))
                .collect();
            (rank(u), piecewise(int(rng.gen_range(0..2)), clauses))
        }
        // a stream against a permutation of itself
        _ => {
            let y = if rng.gen_bool(0.5) {
                periodic_stream(rng)
            } else {
                rank(rank_base(rng))
            };
            let n = rng.gen_range(2..=8u64);
            let mut images: Vec<u64> = (1..=n).collect();
            images.shuffle(rng);
            let perm = FinitePermutation::from_images(images).expect("shuffle is a bijection");
            (y.apply_permutation(&perm), y)
        }
    };
    if rng.gen_bool(0.15) {
        (y, x)
    } else {
        (x, y)
    }
}

fn rank(u: IndexSet) -> Stream {
    Stream::RankFill {
        fill_set: u,
        fill_value: int(1),
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| index_set(&mut rng, 2).to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn generated_pieces_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = index_set(&mut rng, 2);
            assert_eq!(IndexSet::parse(&s.to_string()).unwrap(), s);
            let (x, y) = dominance_pair(&mut rng);
            for z in [x, y] {
                assert_eq!(
                    Stream::parse(&z.to_string()).unwrap().prefix(50),
                    z.prefix(50)
                );
            }
        }
    }

    #[test]
    fn improvement_is_one_off_the_holes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let y = periodic_stream(&mut rng);
            let x = density_one_improvement(&mut rng, &y);
            let (px, py) = (x.prefix(200), y.prefix(200));
            let raised = px
                .iter()
                .zip(&py)
                .filter(|(a, b)| *a - *b == int(1))
                .count();
            assert!(px.iter().zip(&py).all(|(a, b)| a >= b));
            assert!(raised >= 196);
        }
    }
}
