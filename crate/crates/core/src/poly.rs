//! Sparse multivariate polynomials, generic over the coefficient ring.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{One, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::Rational;

/// Variable index into a [`crate::Context`] variable table.
pub type Var = u16;

/// Coefficient ring for [`Polynomial`]. Every ring here is a rational vector space.
pub trait Coeff: Clone + Debug + PartialEq + Zero + One + Send + Sync + 'static {
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale(&self, q: &Rational) -> Self;
    fn from_rational(q: Rational) -> Self;
}

impl Coeff for Rational {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
}

macro_rules! float_coeff {
    ($t:ty) => {
        impl Coeff for $t {
            fn add_ref(&self, other: &Self) -> Self {
                self + other
            }
            fn sub_ref(&self, other: &Self) -> Self {
                self - other
            }
            fn mul_ref(&self, other: &Self) -> Self {
                self * other
            }
            fn neg_ref(&self) -> Self {
                -self
            }
            fn scale(&self, q: &Rational) -> Self {
                self * q.to_f64().unwrap_or(<$t>::NAN as f64) as $t
            }
            fn from_rational(q: Rational) -> Self {
                q.to_f64().unwrap_or(f64::NAN) as $t
            }
        }
    };
}

float_coeff!(f64);
float_coeff!(f32);

/// Power product with graded-lex order: total degree first, then the exponent
/// of the lowest-indexed variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    deg: u32,
    exps: SmallVec<[(Var, u32); 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut exps = SmallVec::new();
        exps.push((v, e));
        Monomial { deg: e, exps }
    }

    pub fn from_exps(pairs: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        let exps: SmallVec<[(Var, u32); 4]> = map.into_iter().filter(|(_, e)| *e > 0).collect();
        let deg = exps.iter().map(|(_, e)| e).sum();
        Monomial { deg, exps }
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.exps.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn exps(&self) -> &[(Var, u32)] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree_in(&self, pred: impl Fn(Var) -> bool) -> u32 {
        self.exps.iter().filter(|(v, _)| pred(*v)).map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = SmallVec::with_capacity(self.exps.len() + other.exps.len());
        let (a, b) = (&self.exps, &other.exps);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                exps.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                exps.push(b[j]);
                j += 1;
            } else {
                exps.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        Monomial { deg: self.deg + other.deg, exps }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = SmallVec::new();
        let mut j = 0;
        for &(v, e) in &self.exps {
            let mut e = e;
            if j < other.exps.len() && other.exps[j].0 < v {
                return None;
            }
            if j < other.exps.len() && other.exps[j].0 == v {
                if other.exps[j].1 > e {
                    return None;
                }
                e -= other.exps[j].1;
                j += 1;
            }
            if e > 0 {
                exps.push((v, e));
            }
        }
        if j < other.exps.len() {
            return None;
        }
        Some(Monomial { deg: self.deg - other.deg, exps })
    }

    /// Exponent of `v` and the monomial with that exponent lowered by one.
    pub fn lower(&self, v: Var) -> Option<(u32, Monomial)> {
        let pos = self.exps.iter().position(|(w, _)| *w == v)?;
        let mut exps = self.exps.clone();
        let e = exps[pos].1;
        if e == 1 {
            exps.remove(pos);
        } else {
            exps[pos].1 -= 1;
        }
        Some((e, Monomial { deg: self.deg - 1, exps }))
    }

    /// Removes variable `v`, returning its exponent and the remaining monomial.
    pub fn split_off(&self, v: Var) -> (u32, Monomial) {
        let e = self.exp(v);
        if e == 0 {
            return (0, self.clone());
        }
        let exps: SmallVec<[(Var, u32); 4]> = self.exps.iter().copied().filter(|(w, _)| *w != v).collect();
        (e, Monomial { deg: self.deg - e, exps })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| {
            let (a, b) = (&self.exps, &other.exps);
            for k in 0..a.len().min(b.len()) {
                if a[k].0 != b[k].0 {
                    // The monomial holding the lower-indexed variable is larger.
                    return if a[k].0 < b[k].0 { Ordering::Greater } else { Ordering::Less };
                }
                if a[k].1 != b[k].1 {
                    return a[k].1.cmp(&b[k].1);
                }
            }
            a.len().cmp(&b.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; absent monomials have zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for Polynomial<C> {
    fn default() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Polynomial<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::constant(C::from_rational(q))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), C::one())
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add_ref(c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, C)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, pred: impl Fn(Var) -> bool) -> Option<u32> {
        self.terms.keys().map(|m| m.degree_in(&pred)).max()
    }

    pub fn degree_of(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.exps().iter().map(|(v, _)| *v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Terms whose degree in the selected variables equals `d`.
    pub fn homogeneous_part_in(&self, d: u32, pred: impl Fn(Var) -> bool) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree_in(&pred) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Components by degree in the selected variables.
    pub fn homogeneous_parts_in(&self, pred: impl Fn(Var) -> bool) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree_in(&pred)).or_default().terms.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        self.map_coeffs(|c| c.scale(q))
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.mul_ref(k));
        }
        out
    }

    pub fn mul_monomial(&self, mono: &Monomial, k: &C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.mul(mono), &c.mul_ref(k));
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::<D>::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.neg_ref());
        }
        out
    }

    pub fn neg_ref(&self) -> Self {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg_ref())).collect() }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut out = Self::zero();
        for (m1, c1) in &small.terms {
            for (m2, c2) in &big.terms {
                out.add_term(m1.mul(m2), &c1.mul_ref(c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.lower(v) {
                out.add_term(rest, &c.scale(&Rational::from_integer(e.into())));
            }
        }
        out
    }

    /// Antiderivative in `v` with zero constant.
    pub fn integrate_var(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v) + 1;
            out.add_term(m.mul(&Monomial::var(v)), &c.scale(&Rational::new(1.into(), e.into())));
        }
        out
    }

    /// Replaces variables by polynomials; `map` returns `None` to keep a variable.
    pub fn substitute(&self, map: impl Fn(Var) -> Option<Self>) -> Self {
        let mut cache: BTreeMap<(Var, u32), Self> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Self::monomial(Monomial::one(), c.clone());
            let mut kept = Vec::new();
            for &(v, e) in m.exps() {
                match map(v) {
                    Some(p) => {
                        let pe = cache.entry((v, e)).or_insert_with(|| p.pow(e)).clone();
                        term = term.mul_ref(&pe);
                    }
                    None => kept.push((v, e)),
                }
            }
            if !kept.is_empty() {
                term = term.mul_monomial(&Monomial::from_exps(kept), &C::one());
            }
            out.add_assign_ref(&term);
        }
        out
    }

    /// Evaluates in any commutative ring `T` that receives the coefficients.
    pub fn eval_with<T>(&self, point: impl Fn(Var) -> T, coeff: impl Fn(&C) -> T) -> T
    where
        T: Clone + Zero + One + std::ops::Mul<Output = T>,
    {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for &(v, e) in m.exps() {
                let x = point(v);
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Division by a polynomial with rational coefficients under graded-lex.
    /// The remainder is zero exactly when `divisor` divides `self`.
    pub fn div_rem(&self, divisor: &Polynomial<Rational>) -> (Self, Self) {
        let (lm, lc) = divisor.leading().expect("division by zero polynomial");
        let inv = lc.recip();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let mut out_rem = Self::zero();
        while let Some((m, c)) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            match m.div(lm) {
                Some(qm) => {
                    let qc = c.scale(&inv);
                    for (dm, dc) in divisor.terms() {
                        rem.add_term(dm.mul(&qm), &qc.scale(dc).neg_ref());
                    }
                    quot.add_term(qm, &qc);
                }
                None => {
                    rem.terms.remove(&m);
                    out_rem.add_term(m, &c);
                }
            }
        }
        (quot, out_rem)
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Polynomial<Rational>) -> Option<Self> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }
}

impl Polynomial<Rational> {
    pub fn to_coeff<C: Coeff>(&self) -> Polynomial<C> {
        self.map_coeffs(|q| C::from_rational(q.clone()))
    }
}

macro_rules! poly_binop {
    ($tr:ident, $f:ident, $imp:ident) => {
        impl<C: Coeff> std::ops::$tr<&Polynomial<C>> for &Polynomial<C> {
            type Output = Polynomial<C>;
            fn $f(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                self.$imp(rhs)
            }
        }
        impl<C: Coeff> std::ops::$tr<Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $f(self, rhs: Polynomial<C>) -> Polynomial<C> {
                self.$imp(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, add_ref);
poly_binop!(Sub, sub, sub_ref);
poly_binop!(Mul, mul, mul_ref);

impl<C: Coeff> std::ops::Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.neg_ref()
    }
}

impl<C: Coeff> std::ops::Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::QPoly;

    fn x(v: Var) -> QPoly {
        QPoly::var(v)
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial::var(0);
        let b = Monomial::var(1);
        let c = Monomial::var_pow(1, 2);
        assert!(a > b);
        assert!(c > a);
        let d = Monomial::from_exps([(0, 1), (2, 1)]);
        let e = Monomial::from_exps([(1, 2)]);
        assert!(d > e);
    }

    #[test]
    fn monomial_division() {
        let m = Monomial::from_exps([(0, 2), (2, 3)]);
        assert_eq!(m.div(&Monomial::var(2)), Some(Monomial::from_exps([(0, 2), (2, 2)])));
        assert_eq!(m.div(&Monomial::var(1)), None);
    }

    #[test]
    fn exact_division() {
        let q = &(&x(0) * &x(0)) + &(&x(1) * &x(1));
        let f = &q * &(&x(0) - &QPoly::from_int(3));
        assert_eq!(f.div_exact(&q), Some(&x(0) - &QPoly::from_int(3)));
        assert_eq!((&f + &x(1)).div_exact(&q), None);
    }

    #[test]
    fn derivative_and_integral() {
        let p = x(0).pow(3) * x(1).pow(2);
        assert_eq!(p.derivative(0), x(0).pow(2) * x(1).pow(2) * QPoly::from_int(3));
        assert_eq!(p.derivative(0).integrate_var(0), p);
    }

    #[test]
    fn float_evaluation() {
        let p = &(&x(0) * &x(1)) + &QPoly::from_int(2);
        let pf: Polynomial<f64> = p.to_coeff();
        let v = pf.eval_with(|v| [1.5, 2.0][v as usize], |c| *c);
        assert!((v - 5.0).abs() < 1e-12);
    }
}
