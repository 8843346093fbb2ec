//! Integer helpers: square-free splitting, small factorizations, factorial-like products.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_LIMIT: u64 = 1_000_000;

/// Splits `n` as `s^2 * t` with `t` square-free.
///
/// Trial division runs up to `min(cbrt(n), 10^6)`; a cofactor left after full
/// cube-root trial division is `1`, `p`, `p^2` or `p*q`, so a perfect-square
/// test settles it exactly.
pub fn squarefree_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut rest = n.clone();
    let mut s = BigUint::one();
    let mut t = BigUint::one();
    let bound = rest.cbrt().to_u64().unwrap_or(u64::MAX).min(TRIAL_LIMIT);
    let mut p = 2u64;
    while p <= bound {
        let bp = BigUint::from(p);
        let mut e = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            s *= bp.pow(e / 2);
            if e % 2 == 1 {
                t *= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        s *= r;
    } else {
        t *= rest;
    }
    (s, t)
}

/// Prime factorization by trial division up to 10^6. A cofactor that survives
/// is kept as a single atom.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    let mut rest = n.clone();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0u32;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigUint::one() {
        match out.iter_mut().find(|(q, _)| *q == rest) {
            Some(entry) => entry.1 += 1,
            None => out.push((rest, 1)),
        }
    }
    out.sort();
    out
}

/// `k!!` with the convention `k!! = 1` for `k <= 0`.
pub fn double_factorial(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut i = k;
    while i > 1 {
        acc *= i;
        i -= 2;
    }
    acc
}

pub fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// Binomial coefficient, zero when `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}
