//! Exact real constants: finite sums of `c * sqrt(d) * pi^(k/2) * prod log(p)^m`.
//!
//! Logarithms are kept over a prime basis and distinct signatures are treated
//! as linearly independent over the rationals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factorize, squarefree_split};
use crate::error::{HftError, Result};
use crate::poly::Coeff;
use crate::Rational;

mod approx;

/// Irrational part of a scalar term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    /// Square-free positive integer under the square root.
    pub radicand: BigUint,
    /// Exponent of `pi^(1/2)`.
    pub pi_half_exp: i32,
    /// Prime logarithms with positive powers, sorted by prime.
    pub logs: Vec<(BigUint, u32)>,
}

impl Signature {
    pub fn unit() -> Self {
        Signature { radicand: BigUint::one(), pi_half_exp: 0, logs: Vec::new() }
    }

    pub fn is_unit(&self) -> bool {
        self.radicand.is_one() && self.pi_half_exp == 0 && self.logs.is_empty()
    }

    fn log_degree(&self) -> u32 {
        self.logs.iter().map(|(_, m)| *m).sum()
    }

    /// Product of signatures and the rational square content it releases.
    fn mul(&self, other: &Signature) -> (BigUint, Signature) {
        let g = self.radicand.gcd(&other.radicand);
        let radicand = (&self.radicand / &g) * (&other.radicand / &g);
        let mut logs = self.logs.clone();
        for (p, m) in &other.logs {
            match logs.binary_search_by(|(q, _)| q.cmp(p)) {
                Ok(i) => logs[i].1 += m,
                Err(i) => logs.insert(i, (p.clone(), *m)),
            }
        }
        (g, Signature { radicand, pi_half_exp: self.pi_half_exp + other.pi_half_exp, logs })
    }
}

impl Ord for Signature {
    fn cmp(&self, other: &Self) -> Ordering {
        self.log_degree()
            .cmp(&other.log_degree())
            .then_with(|| self.logs.cmp(&other.logs))
            .then_with(|| self.pi_half_exp.cmp(&other.pi_half_exp))
            .then_with(|| self.radicand.cmp(&other.radicand))
    }
}

impl PartialOrd for Signature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarTerm {
    pub coeff: Rational,
    pub sig: Signature,
}

/// Exact scalar. Terms are sorted by signature with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: Vec<ScalarTerm>,
}

impl Scalar {
    pub fn from_rational(q: Rational) -> Self {
        Self::from_term(q, Signature::unit())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn from_term(coeff: Rational, sig: Signature) -> Self {
        if coeff.is_zero() {
            Scalar::default()
        } else {
            Scalar { terms: vec![ScalarTerm { coeff, sig }] }
        }
    }

    /// `pi^(k/2)`.
    pub fn pi_half_pow(k: i32) -> Self {
        Self::from_term(Rational::one(), Signature { pi_half_exp: k, ..Signature::unit() })
    }

    pub fn pi() -> Self {
        Self::pi_half_pow(2)
    }

    /// Square root of a nonnegative rational.
    pub fn sqrt_rational(q: &Rational) -> Result<Self> {
        if q.is_negative() {
            return Err(HftError::NegativeRadicand);
        }
        if q.is_zero() {
            return Ok(Scalar::default());
        }
        let num = q.numer().magnitude() * q.denom().magnitude();
        let (s, t) = squarefree_split(&num);
        let coeff = Rational::new(BigInt::from(s), q.denom().clone());
        Ok(Self::from_term(coeff, Signature { radicand: t, ..Signature::unit() }))
    }

    /// Natural logarithm of a positive rational, expanded over prime logarithms.
    pub fn log_rational(q: &Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(HftError::NonInvertibleScalar(format!("log of nonpositive value {q}")));
        }
        let mut out = Scalar::default();
        for (p, e) in factorize(q.numer().magnitude()) {
            out = out + Self::log_prime(p).scale_int(e as i64);
        }
        for (p, e) in factorize(q.denom().magnitude()) {
            out = out - Self::log_prime(p).scale_int(e as i64);
        }
        Ok(out)
    }

    fn log_prime(p: BigUint) -> Self {
        Self::from_term(Rational::one(), Signature { logs: vec![(p, 1)], ..Signature::unit() })
    }

    pub fn terms(&self) -> &[ScalarTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational value when the scalar has no irrational part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [t] if t.sig.is_unit() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Scalar::default();
        }
        Scalar { terms: self.terms.iter().map(|t| ScalarTerm { coeff: &t.coeff * q, sig: t.sig.clone() }).collect() }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(k)))
    }

    fn add_impl(&self, other: &Scalar, negate: bool) -> Scalar {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        let neg = |t: &ScalarTerm| {
            if negate {
                ScalarTerm { coeff: -t.coeff.clone(), sig: t.sig.clone() }
            } else {
                t.clone()
            }
        };
        while i < a.len() || j < b.len() {
            let ord = if i == a.len() {
                Ordering::Greater
            } else if j == b.len() {
                Ordering::Less
            } else {
                a[i].sig.cmp(&b[j].sig)
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(neg(&b[j]));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].coeff - &b[j].coeff } else { &a[i].coeff + &b[j].coeff };
                    if !c.is_zero() {
                        out.push(ScalarTerm { coeff: c, sig: a[i].sig.clone() });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Scalar { terms: out }
    }

    fn mul_impl(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::default();
        }
        if let Some(q) = self.as_rational() {
            return other.scale(&q);
        }
        if let Some(q) = other.as_rational() {
            return self.scale(&q);
        }
        let mut acc: Vec<ScalarTerm> = Vec::new();
        for s in &self.terms {
            for t in &other.terms {
                let (g, sig) = s.sig.mul(&t.sig);
                let coeff = &s.coeff * &t.coeff * Rational::from_integer(BigInt::from(g));
                acc.push(ScalarTerm { coeff, sig });
            }
        }
        acc.sort_by(|x, y| x.sig.cmp(&y.sig));
        let mut out: Vec<ScalarTerm> = Vec::with_capacity(acc.len());
        for t in acc {
            match out.last_mut() {
                Some(last) if last.sig == t.sig => last.coeff += t.coeff,
                _ => out.push(t),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Scalar { terms: out }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        acc
    }

    /// Inverse of a single-term scalar without logarithms.
    pub fn inverse(&self) -> Result<Scalar> {
        match self.terms.as_slice() {
            [] => Err(HftError::NonInvertibleScalar("division by zero".into())),
            [t] if t.sig.logs.is_empty() => {
                let d = Rational::from_integer(BigInt::from(t.sig.radicand.clone()));
                let coeff = (t.coeff.clone() * d).recip();
                Ok(Self::from_term(
                    coeff,
                    Signature { radicand: t.sig.radicand.clone(), pi_half_exp: -t.sig.pi_half_exp, logs: Vec::new() },
                ))
            }
            _ => Err(HftError::NonInvertibleScalar(self.to_string())),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        if let Some(q) = other.as_rational() {
            if q.is_zero() {
                return Err(HftError::NonInvertibleScalar("division by zero".into()));
            }
            return Ok(self.scale(&q.recip()));
        }
        Ok(self.mul_impl(&other.inverse()?))
    }

    /// Exact square root of a single-term scalar with rational or even-pi part.
    pub fn sqrt(&self) -> Result<Scalar> {
        match self.terms.as_slice() {
            [] => Ok(Scalar::default()),
            [t] => {
                if t.coeff.is_negative() {
                    return Err(HftError::NegativeRadicand);
                }
                if t.sig.pi_half_exp % 2 != 0 {
                    return Err(HftError::OddPiExponent);
                }
                if !t.sig.radicand.is_one() || !t.sig.logs.is_empty() {
                    return Err(HftError::IrreducibleRoot);
                }
                let root = Self::sqrt_rational(&t.coeff)?;
                Ok(root.mul_impl(&Self::pi_half_pow(t.sig.pi_half_exp / 2)))
            }
            _ => Err(HftError::MultiTermSqrt),
        }
    }

    /// Sign of the value, decided numerically at increasing precision.
    pub fn signum(&self) -> i32 {
        if let Some(q) = self.as_rational() {
            return if q.is_zero() {
                0
            } else if q.is_positive() {
                1
            } else {
                -1
            };
        }
        approx::sign(self)
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.coeff.to_f64().unwrap_or(f64::NAN);
                v *= t.sig.radicand.to_f64().unwrap_or(f64::NAN).sqrt();
                v *= std::f64::consts::PI.sqrt().powi(t.sig.pi_half_exp);
                for (p, m) in &t.sig.logs {
                    v *= p.to_f64().unwrap_or(f64::NAN).ln().powi(*m as i32);
                }
                v
            })
            .sum()
    }

    /// Correctly rounded decimal rendering with `digits` significant digits.
    pub fn approx(&self, digits: usize) -> String {
        approx::approx(self, digits.max(1))
    }

    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let c = t.coeff.abs();
            let mut factors = Vec::new();
            if !t.sig.radicand.is_one() {
                factors.push(format!("\\sqrt{{{}}}", t.sig.radicand));
            }
            let k = t.sig.pi_half_exp;
            if k != 0 {
                factors.push(match (k % 2 == 0, k / 2) {
                    (true, 1) => "\\pi".to_string(),
                    (true, e) => format!("\\pi^{{{e}}}"),
                    (false, _) => format!("\\pi^{{{k}/2}}"),
                });
            }
            for (p, m) in &t.sig.logs {
                factors.push(if *m == 1 { format!("\\log {p}") } else { format!("\\log^{{{m}}} {p}") });
            }
            let num = c.numer().to_string();
            let body = if factors.is_empty() {
                num
            } else if c.numer().is_one() {
                factors.join(" ")
            } else {
                format!("{num} {}", factors.join(" "))
            };
            if c.denom().is_one() {
                out.push_str(&body);
            } else {
                out.push_str(&format!("\\frac{{{body}}}{{{}}}", c.denom()));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|t| {
                serde_json::json!({
                    "coeff": t.coeff.to_string(),
                    "radicand": t.sig.radicand.to_string(),
                    "piHalfExp": t.sig.pi_half_exp,
                    "logs": t.sig.logs.iter().map(|(p, m)| serde_json::json!({"prime": p.to_string(), "pow": m})).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({ "terms": terms })
    }

    /// True when the text rendering needs parentheses as a factor.
    pub fn needs_parens(&self) -> bool {
        self.terms.len() > 1
    }
}

fn term_text(t: &ScalarTerm, abs: bool) -> String {
    let c = if abs { t.coeff.abs() } else { t.coeff.clone() };
    let mut factors = Vec::new();
    if !t.sig.radicand.is_one() {
        factors.push(format!("sqrt({})", t.sig.radicand));
    }
    let k = t.sig.pi_half_exp;
    if k != 0 {
        factors.push(match (k % 2 == 0, k / 2) {
            (true, 1) => "pi".to_string(),
            (true, e) => format!("pi^{e}"),
            (false, _) => format!("pi^({k}/2)"),
        });
    }
    for (p, m) in &t.sig.logs {
        factors.push(if *m == 1 { format!("log({p})") } else { format!("log({p})^{m}") });
    }
    if factors.is_empty() {
        return c.to_string();
    }
    let mut s = String::new();
    let numer = c.numer();
    if numer.is_one() {
    } else if (-numer).is_one() {
        s.push('-');
    } else {
        s.push_str(&numer.to_string());
        s.push('*');
    }
    s.push_str(&factors.join("*"));
    if !c.denom().is_one() {
        s.push('/');
        s.push_str(&c.denom().to_string());
    }
    s
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i == 0 {
                write!(f, "{}", term_text(t, false))?;
            } else if t.coeff.is_negative() {
                write!(f, " - {}", term_text(t, true))?;
            } else {
                write!(f, " + {}", term_text(t, false))?;
            }
        }
        Ok(())
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl std::ops::Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.add_impl(&rhs, false)
    }
}

impl std::ops::Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.add_impl(&rhs, true)
    }
}

impl std::ops::Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.mul_impl(&rhs)
    }
}

impl<'a> std::ops::Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_impl(rhs, false)
    }
}

impl<'a> std::ops::Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.add_impl(rhs, true)
    }
}

impl<'a> std::ops::Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_impl(rhs)
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.into_iter().map(|t| ScalarTerm { coeff: -t.coeff, sig: t.sig }).collect() }
    }
}

impl num_traits::Zero for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl num_traits::One for Scalar {
    fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }
}

impl Coeff for Scalar {
    fn add_ref(&self, other: &Self) -> Self {
        self.add_impl(other, false)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_impl(other, true)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul_impl(other)
    }
    fn neg_ref(&self) -> Self {
        self.clone().neg()
    }
    fn scale(&self, q: &Rational) -> Self {
        Scalar::scale(self, q)
    }
    fn from_rational(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

pub(crate) fn bigint_sign(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

use std::ops::Neg;

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, r: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(r))
    }

    #[test]
    fn sqrt_products_collapse() {
        let s2 = Scalar::sqrt_rational(&q(2, 1)).unwrap();
        let s6 = Scalar::sqrt_rational(&q(6, 1)).unwrap();
        let prod = &s2 * &s6;
        assert_eq!(prod, Scalar::sqrt_rational(&q(12, 1)).unwrap());
        assert_eq!(prod.to_string(), "2*sqrt(3)");
        assert_eq!(&s2 * &s2, Scalar::from_int(2));
    }

    #[test]
    fn log_reduces_to_primes() {
        let l4 = Scalar::log_rational(&q(4, 1)).unwrap();
        let l2 = Scalar::log_rational(&q(2, 1)).unwrap();
        assert_eq!(l4, l2.scale_int(2));
        let l = Scalar::log_rational(&q(5, 3)).unwrap();
        assert_eq!(l.to_string(), "-log(3) + log(5)");
    }

    #[test]
    fn render_pi_over_two() {
        let v = Scalar::pi().pow(2).scale(&q(1, 2));
        assert_eq!(v.to_string(), "pi^2/2");
        let w = Scalar::pi_half_pow(-1).scale(&q(3, 16)) * Scalar::sqrt_rational(&q(11, 1)).unwrap();
        assert_eq!(w.to_string(), "3*sqrt(11)*pi^(-1/2)/16");
    }

    #[test]
    fn sqrt_errors() {
        let two_terms = Scalar::one() + Scalar::pi();
        assert_eq!(two_terms.sqrt(), Err(HftError::MultiTermSqrt));
        assert_eq!(Scalar::pi().sqrt().unwrap(), Scalar::pi_half_pow(1));
        assert_eq!(Scalar::pi_half_pow(1).sqrt(), Err(HftError::OddPiExponent));
        assert_eq!(Scalar::from_int(-4).sqrt(), Err(HftError::NegativeRadicand));
    }

    #[test]
    fn sqrt_of_rational_times_pi() {
        let s = Scalar::pi().scale(&q(11, 256)).sqrt().unwrap();
        assert_eq!(s, Scalar::sqrt_rational(&q(11, 1)).unwrap() * Scalar::pi_half_pow(1).scale(&q(1, 16)));
    }

    #[test]
    fn inverse_rationalizes() {
        let s = Scalar::sqrt_rational(&q(3, 1)).unwrap().scale(&q(2, 1));
        let inv = s.inverse().unwrap();
        assert_eq!(&inv * &s, Scalar::one());
        assert_eq!(inv.to_string(), "sqrt(3)/6");
        assert!(Scalar::log_rational(&q(2, 1)).unwrap().inverse().is_err());
    }

    #[test]
    fn zero_and_identity() {
        let a = Scalar::pi() + Scalar::from_int(3);
        assert!((&a - &a).is_zero());
        assert_eq!(&a * &Scalar::one(), a);
    }

    #[test]
    fn json_mirrors_terms() {
        let v = Scalar::pi().scale(&q(1, 2)).to_json();
        assert_eq!(v["terms"][0]["coeff"], "1/2");
        assert_eq!(v["terms"][0]["piHalfExp"], 2);
    }
}
