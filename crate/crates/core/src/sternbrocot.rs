//! Breadth-first enumeration of the rationals in `(0, 1)` along the Stern–Brocot tree.
//!
//! Index `k >= 1` is read in binary: the leading one selects the root `1/2`, each
//! following bit descends left (`0`) or right (`1`). Within one level the nodes are
//! visited left to right, so values increase along each level, and every reduced
//! fraction in `(0, 1)` appears exactly once.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug)]
struct Node {
    left: (BigUint, BigUint),
    right: (BigUint, BigUint),
}

impl Node {
    fn root() -> Self {
        Node {
            left: (BigUint::zero(), BigUint::one()),
            right: (BigUint::one(), BigUint::one()),
        }
    }

    fn value(&self) -> (BigUint, BigUint) {
        (&self.left.0 + &self.right.0, &self.left.1 + &self.right.1)
    }

    fn descend(&mut self, go_right: bool) {
        let mid = self.value();
        if go_right {
            self.left = mid;
        } else {
            self.right = mid;
        }
    }
}

fn to_rational((p, q): (BigUint, BigUint)) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// The `k`-th rational (1-indexed). Panics on `k == 0`.
pub fn nth_rational(k: &BigUint) -> BigRational {
    assert!(!k.is_zero(), "enumeration is 1-indexed");
    let bits = k.bits();
    let mut node = Node::root();
    for i in (0..bits - 1).rev() {
        node.descend(k.bit(i));
    }
    to_rational(node.value())
}

/// Level of index `k`: level `d` holds indices `2^(d-1) .. 2^d - 1`.
fn level_of(k: &BigUint) -> u64 {
    k.bits()
}

/// Number of nodes on level `depth` (1-based) whose value is strictly below `r`.
pub(crate) fn level_count_below(depth: u64, r: &BigRational) -> BigUint {
    let mut node = Node::root();
    let mut below = BigUint::zero();
    for step in 0..depth {
        let value = to_rational(node.value());
        let remaining = depth - 1 - step;
        if step + 1 == depth {
            if &value < r {
                below += 1u32;
            }
            break;
        }
        if r >= &value {
            // the node and its whole left subtree are below r at this level
            below += BigUint::one() << remaining.saturating_sub(1);
            node.descend(true);
        } else {
            node.descend(false);
        }
    }
    below
}

/// `|{ i <= n : nth_rational(i) >= r }|`.
pub fn count_at_least(r: &BigRational, n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    if r <= &BigRational::zero() {
        return n.clone();
    }
    if r > &BigRational::one() {
        return BigUint::zero();
    }
    let last_level = level_of(n);
    let mut total = BigUint::zero();
    for depth in 1..last_level {
        let size = BigUint::one() << (depth - 1);
        total += size - level_count_below(depth, r);
    }
    // partial last level: positions 0..=p, values increasing
    let level_start = BigUint::one() << (last_level - 1);
    let visited = n - &level_start + 1u32;
    let below = level_count_below(last_level, r);
    if visited > below {
        total += visited - below;
    }
    total
}

/// Limit of the fraction of level-`d` nodes whose value is strictly below `r`, as `d` grows.
///
/// The limit is a dyadic rational (Minkowski's question-mark function at `r`) and is
/// reached exactly once `d` exceeds the depth of `r` in the tree.
pub fn limiting_fraction_below(r: &BigRational) -> BigRational {
    if r <= &BigRational::zero() {
        return BigRational::zero();
    }
    if r >= &BigRational::one() {
        return BigRational::one();
    }
    let mut node = Node::root();
    let mut frac = BigRational::zero();
    let mut weight = BigRational::new(BigInt::one(), BigInt::from(2));
    loop {
        let value = to_rational(node.value());
        if r < &value {
            node.descend(false);
        } else {
            frac += &weight;
            if r == &value {
                return frac;
            }
            node.descend(true);
        }
        weight /= BigInt::from(2);
    }
}

/// Position of `q` in the enumeration, if `q` is a reduced fraction in `(0, 1)`.
pub fn index_of(q: &BigRational) -> Option<BigUint> {
    if q <= &BigRational::zero() || q >= &BigRational::one() {
        return None;
    }
    let target_n = q.numer().to_biguint()?;
    let target_d = q.denom().to_biguint()?;
    let mut node = Node::root();
    let mut index = BigUint::one();
    loop {
        let (p, d) = node.value();
        // compare target with p/d by cross multiplication
        let lhs = &target_n * &d;
        let rhs = &p * &target_d;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Equal => return Some(index),
            std::cmp::Ordering::Less => {
                index <<= 1u32;
                node.descend(false);
            }
            std::cmp::Ordering::Greater => {
                index = (index << 1u32) + 1u32;
                node.descend(true);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rational_from_u64;
    use std::collections::HashSet;

    fn q(k: u64) -> BigRational {
        nth_rational(&BigUint::from(k))
    }

    #[test]
    fn first_levels() {
        let expected = [
            (1, 2),
            (1, 3),
            (2, 3),
            (1, 4),
            (2, 5),
            (3, 5),
            (3, 4),
            (1, 5),
            (2, 7),
            (3, 8),
            (3, 7),
            (4, 7),
            (5, 8),
            (5, 7),
            (4, 5),
        ];
        for (i, (p, d)) in expected.iter().enumerate() {
            assert_eq!(
                q(i as u64 + 1),
                rational_from_u64(*p, *d),
                "index {}",
                i + 1
            );
        }
    }

    #[test]
    fn injective_and_in_unit_interval() {
        let mut seen = HashSet::new();
        for k in 1..=10_000u64 {
            let v = q(k);
            assert!(v > BigRational::zero() && v < BigRational::one());
            assert!(seen.insert(v), "duplicate at {k}");
        }
    }

    #[test]
    fn index_round_trip() {
        for k in 1..=2_000u64 {
            assert_eq!(index_of(&q(k)), Some(BigUint::from(k)));
        }
        assert_eq!(
            index_of(&rational_from_u64(5, 6)),
            Some(BigUint::from(31u32))
        );
    }

    #[test]
    fn limiting_fraction_matches_deep_levels() {
        for (p, d) in [(1u64, 2u64), (1, 3), (2, 3), (3, 7), (5, 8), (1, 10)] {
            let r = rational_from_u64(p, d);
            let depth = 40;
            let exact = BigRational::new(
                BigInt::from(level_count_below(depth, &r)),
                BigInt::from(BigUint::one() << (depth - 1)),
            );
            assert_eq!(limiting_fraction_below(&r), exact, "r={p}/{d}");
        }
        assert_eq!(
            limiting_fraction_below(&rational_from_u64(1, 2)),
            rational_from_u64(1, 2)
        );
        assert_eq!(
            limiting_fraction_below(&rational_from_u64(1, 3)),
            rational_from_u64(1, 4)
        );
    }

    #[test]
    fn count_matches_scan() {
        for (p, d) in [(1u64, 3u64), (2, 3), (1, 2), (3, 7), (9, 10), (1, 1000)] {
            let r = rational_from_u64(p, d);
            let mut running = 0u64;
            for n in 1..=600u64 {
                if q(n) >= r {
                    running += 1;
                }
                assert_eq!(
                    count_at_least(&r, &BigUint::from(n)),
                    BigUint::from(running),
                    "r={p}/{d} n={n}"
                );
            }
        }
    }
}
