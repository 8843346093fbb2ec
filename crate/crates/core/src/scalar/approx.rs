//! Fixed-point evaluation of scalars for decimal output.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::{bigint_sign, Scalar, ScalarTerm};
use crate::Rational;

/// Values scaled by `2^bits`.
struct Fixed {
    bits: u64,
}

impl Fixed {
    fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits) / b
    }

    fn rational(&self, q: &Rational) -> BigInt {
        (q.numer() << self.bits) / q.denom()
    }

    fn sqrt(&self, a: &BigInt) -> BigInt {
        (a << self.bits).sqrt()
    }

    /// `atan(1/k)` by its Taylor series.
    fn atan_inv(&self, k: u64) -> BigInt {
        let k2 = BigInt::from(k * k);
        let mut power = self.one() / BigInt::from(k);
        let mut sum = BigInt::zero();
        let mut n = 1u64;
        let mut sign = true;
        while !power.is_zero() {
            let term = &power / BigInt::from(n);
            if sign {
                sum += term;
            } else {
                sum -= term;
            }
            power /= &k2;
            n += 2;
            sign = !sign;
        }
        sum
    }

    fn pi(&self) -> BigInt {
        BigInt::from(16) * self.atan_inv(5) - BigInt::from(4) * self.atan_inv(239)
    }

    /// `2 atanh(y)` for a fixed-point `0 <= y <= 1/3`.
    fn two_atanh(&self, y: &BigInt) -> BigInt {
        let y2 = self.mul(y, y);
        let mut power = y.clone();
        let mut sum = BigInt::zero();
        let mut n = 1u64;
        while !power.is_zero() {
            sum += &power / BigInt::from(n);
            power = self.mul(&power, &y2);
            n += 2;
        }
        sum * 2
    }

    fn ln_int(&self, p: &BigUint) -> BigInt {
        let ln2 = self.two_atanh(&self.rational(&Rational::new(BigInt::one(), BigInt::from(3))));
        let k = p.bits() - 1;
        let pow = BigInt::one() << k;
        let p = BigInt::from(p.clone());
        let y = self.rational(&Rational::new(&p - &pow, &p + &pow));
        ln2 * BigInt::from(k) + self.two_atanh(&y)
    }
}

fn eval_fixed(s: &Scalar, bits: u64) -> BigInt {
    let fx = Fixed { bits };
    let pi = fx.pi();
    let sqrt_pi = fx.sqrt(&pi);
    let mut sum = BigInt::zero();
    for ScalarTerm { coeff, sig } in s.terms() {
        let mut v = fx.rational(coeff);
        if !sig.radicand.is_one() {
            v = fx.mul(&v, &fx.sqrt(&(BigInt::from(sig.radicand.clone()) << bits)));
        }
        let k = sig.pi_half_exp;
        for _ in 0..k.unsigned_abs() {
            v = if k > 0 { fx.mul(&v, &sqrt_pi) } else { fx.div(&v, &sqrt_pi) };
        }
        for (p, m) in &sig.logs {
            let l = fx.ln_int(p);
            for _ in 0..*m {
                v = fx.mul(&v, &l);
            }
        }
        sum += v;
    }
    sum
}

/// Working precision in bits; grows with the magnitude of the exponents involved.
fn base_bits(s: &Scalar, digits: usize) -> u64 {
    let mut extra = 0u64;
    for t in s.terms() {
        extra =
            extra.max(t.coeff.numer().bits() + t.coeff.denom().bits()).max(8 * t.sig.pi_half_exp.unsigned_abs() as u64);
    }
    (digits as u64) * 4 + 64 + extra
}

/// `floor(|v| * 10^p)` and the sign of `v`, both exact for rationals.
fn scaled_floor(s: &Scalar, bits: u64, p: u64) -> (BigInt, i32) {
    if let Some(q) = s.as_rational() {
        let scaled = q.abs() * Rational::from_integer(BigInt::from(10).pow(p as u32));
        return (scaled.floor().to_integer(), bigint_sign(q.numer()));
    }
    let v = eval_fixed(s, bits);
    let sign = bigint_sign(&v);
    ((v.abs() * BigInt::from(10).pow(p as u32)) >> bits, sign)
}

/// Significant digits and decimal exponent of `|v|`, or `None` when the
/// precision is insufficient to decide.
fn digits_at(s: &Scalar, digits: usize, bits: u64) -> Option<(String, i64, i32)> {
    let p = bits * 3 / 10 - 8;
    let (t, sign) = scaled_floor(s, bits, p);
    let text = t.to_string();
    if t.is_zero() || text.len() < digits + 4 {
        return None;
    }
    let e = text.len() as i64 - 1 - p as i64;
    let (head, tail) = text.split_at(digits);
    let mut head: BigInt = head.parse().ok()?;
    let first_tail = tail.as_bytes()[0] - b'0';
    if !s.is_rational() {
        // Irrational values never sit on a rounding boundary; reject digit runs
        // too close to one for the working precision.
        let rest = &tail[1..];
        if rest.bytes().all(|c| c == b'9') || rest.bytes().all(|c| c == b'0') {
            return None;
        }
    }
    if first_tail >= 5 {
        head += 1;
    }
    let mut ds = head.to_string();
    let mut e = e;
    if ds.len() > digits {
        ds.truncate(digits);
        e += 1;
    }
    Some((ds, e, sign))
}

pub(super) fn approx(s: &Scalar, digits: usize) -> String {
    if s.is_zero() {
        return format!("0.{}", "0".repeat(digits));
    }
    let mut bits = base_bits(s, digits);
    loop {
        let here = digits_at(s, digits, bits);
        let finer = digits_at(s, digits, bits + 64);
        if let (Some(a), Some(b)) = (here, finer) {
            if a == b {
                return format_digits(&a.0, a.1, a.2);
            }
        }
        bits *= 2;
    }
}

pub(super) fn sign(s: &Scalar) -> i32 {
    let mut bits = base_bits(s, 8);
    loop {
        let v = eval_fixed(s, bits);
        let margin = BigInt::from(s.terms().len() as u64 * 16 + 64);
        if v.abs() > margin {
            return bigint_sign(&v);
        }
        bits *= 2;
        if bits > 1 << 16 {
            return 0;
        }
    }
}

fn format_digits(ds: &str, e: i64, sign: i32) -> String {
    let d = ds.len() as i64;
    let body = if e >= d || e <= -7 {
        let mut m = ds[..1].to_string();
        if d > 1 {
            m.push('.');
            m.push_str(&ds[1..]);
        }
        format!("{m}e{e}")
    } else if e >= 0 {
        let (int, frac) = ds.split_at((e + 1) as usize);
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        format!("0.{}{}", "0".repeat((-e - 1) as usize), ds)
    };
    if sign < 0 {
        format!("-{body}")
    } else {
        body
    }
}
