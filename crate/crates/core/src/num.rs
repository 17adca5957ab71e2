//! Big-integer helpers shared by the set algebra and the stream layer.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

const CACHED_FACTORIALS: usize = 128;

fn factorial_table() -> &'static [BigUint] {
    static TABLE: OnceLock<Vec<BigUint>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(CACHED_FACTORIALS);
        let mut acc = BigUint::one();
        table.push(acc.clone());
        for k in 1..CACHED_FACTORIALS as u64 {
            acc *= k;
            table.push(acc.clone());
        }
        table
    })
}

/// `n!` as an arbitrary-precision integer.
pub fn factorial(n: &BigUint) -> BigUint {
    match n.to_usize() {
        Some(small) if small < CACHED_FACTORIALS => factorial_table()[small].clone(),
        _ => {
            let table = factorial_table();
            let mut acc = table[CACHED_FACTORIALS - 1].clone();
            let mut k = BigUint::from(CACHED_FACTORIALS as u64);
            while &k <= n {
                acc *= &k;
                k += 1u32;
            }
            acc
        }
    }
}

pub fn factorial_u64(n: u64) -> BigUint {
    factorial(&BigUint::from(n))
}

/// Largest `k >= 1` with `k! <= n`, or `None` when `n == 0`.
pub fn factorial_floor(n: &BigUint) -> Option<BigUint> {
    if n.is_zero() {
        return None;
    }
    let table = factorial_table();
    if n < &table[CACHED_FACTORIALS - 1] {
        let idx = table.partition_point(|f| f <= n);
        // table[0] = 0! = 1 = 1!, so idx >= 2 whenever n >= 1
        return Some(BigUint::from((idx - 1).max(1) as u64));
    }
    let mut k = BigUint::from((CACHED_FACTORIALS - 1) as u64);
    let mut acc = table[CACHED_FACTORIALS - 1].clone();
    loop {
        let next = &k + 1u32;
        let next_acc = &acc * &next;
        if &next_acc > n {
            return Some(k);
        }
        k = next;
        acc = next_acc;
    }
}

/// Returns `k >= 1` with `k! = t`, if any. `1 = 1!` maps to `k = 1`.
pub fn factorial_inverse(t: &BigUint) -> Option<BigUint> {
    let k = factorial_floor(t)?;
    (factorial(&k) == *t).then_some(k)
}

pub fn rational_from_u64(numer: u64, denom: u64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn nat_to_rational(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer.parse().ok()?;
    let denom: BigInt = denom.parse().ok()?;
    if denom.is_zero() {
        return None;
    }
    Some(BigRational::new(numer, denom))
}

/// Floor of a rational as a big integer.
pub fn floor_rational(q: &BigRational) -> BigInt {
    q.floor().to_integer()
}

/// Converts a non-negative big integer to a natural; negative input yields zero.
pub fn clamp_to_nat(n: &BigInt) -> BigUint {
    n.to_biguint().unwrap_or_default()
}
