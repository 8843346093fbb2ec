//! Expressions: sums of `polynomial * prod B^(h/2) * log(B)^k` over registered bases.
//!
//! Canonical form: terms are grouped by the parity of each half-exponent and
//! each logarithm power; a group becomes one term over a common denominator,
//! and bases dividing the numerator are moved into the exponent. Even,
//! non-negative powers without logarithms are expanded into the polynomial.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};

use crate::context::{BaseId, Context};
use crate::error::{HftError, Result};
use crate::poly::{Monomial, Var};
use crate::scalar::Scalar;
use crate::{Poly, QPoly, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseFactor {
    pub base: BaseId,
    pub half_exp: i32,
    pub log_pow: u32,
}

pub type Factors = Vec<BaseFactor>;

#[derive(Clone, Debug)]
pub struct Expr {
    ctx: Context,
    terms: BTreeMap<Factors, Poly>,
}

fn merge_factors(a: &[BaseFactor], b: &[BaseFactor]) -> Factors {
    let mut out: Factors = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].base < b[j].base) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].base < a[i].base {
            out.push(b[j].clone());
            j += 1;
        } else {
            let f = BaseFactor {
                base: a[i].base,
                half_exp: a[i].half_exp + b[j].half_exp,
                log_pow: a[i].log_pow + b[j].log_pow,
            };
            if f.half_exp != 0 || f.log_pow != 0 {
                out.push(f);
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Cache of base powers as scalar polynomials.
struct PowCache<'a> {
    ctx: &'a Context,
    cache: HashMap<(BaseId, u32), Poly>,
}

impl<'a> PowCache<'a> {
    fn new(ctx: &'a Context) -> Self {
        PowCache { ctx, cache: HashMap::new() }
    }

    fn get(&mut self, b: BaseId, k: u32) -> Poly {
        if k == 0 {
            return Poly::one();
        }
        if let Some(p) = self.cache.get(&(b, k)) {
            return p.clone();
        }
        let p = if k == 1 {
            self.ctx.base(b).poly.to_coeff()
        } else {
            let half = self.get(b, k / 2);
            let mut p = half.mul_ref(&half);
            if k % 2 == 1 {
                p = p.mul_ref(&self.get(b, 1));
            }
            p
        };
        self.cache.insert((b, k), p.clone());
        p
    }
}

impl Expr {
    pub fn zero(ctx: &Context) -> Self {
        Expr { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Context) -> Self {
        Self::from_poly(ctx, Poly::one())
    }

    pub fn from_poly(ctx: &Context, p: Poly) -> Self {
        Self::from_term(ctx, p, Vec::new())
    }

    pub fn from_qpoly(ctx: &Context, p: &QPoly) -> Self {
        Self::from_poly(ctx, p.to_coeff())
    }

    pub fn constant(ctx: &Context, c: Scalar) -> Self {
        Self::from_poly(ctx, Poly::constant(c))
    }

    pub fn rational(ctx: &Context, q: Rational) -> Self {
        Self::constant(ctx, Scalar::from_rational(q))
    }

    pub fn int(ctx: &Context, n: i64) -> Self {
        Self::constant(ctx, Scalar::from_int(n))
    }

    pub fn var(ctx: &Context, v: Var) -> Self {
        Self::from_poly(ctx, Poly::var(v))
    }

    /// Term `p * factors`; factors are normalized but not canonicalized.
    pub fn from_term(ctx: &Context, p: Poly, factors: Factors) -> Self {
        let mut e = Self::zero(ctx);
        let mut fs: Factors = Vec::new();
        for f in factors {
            fs = merge_factors(&fs, &[f]);
        }
        e.add_term(fs, p);
        e
    }

    /// `B^(h/2)` for a registered base.
    pub fn base_factor(ctx: &Context, base: BaseId, half_exp: i32) -> Self {
        Self::from_term(ctx, Poly::one(), vec![BaseFactor { base, half_exp, log_pow: 0 }])
    }

    /// `log(B)^k` for a registered base.
    pub fn base_log(ctx: &Context, base: BaseId, log_pow: u32) -> Self {
        Self::from_term(ctx, Poly::one(), vec![BaseFactor { base, half_exp: 0, log_pow }])
    }

    /// `||x||^h` over the coordinates.
    pub fn norm_pow(ctx: &Context, h: i32) -> Self {
        Self::base_factor(ctx, ctx.norm_base(), h).canonical()
    }

    /// `p^(h/2)` for a rational polynomial, registering `p` as a base.
    pub fn base_pow(ctx: &Context, p: &QPoly, h: i32) -> Result<Self> {
        if p.is_constant() {
            let c = p.constant_term();
            return Ok(Self::constant(ctx, rational_half_pow(&c, h)?));
        }
        let (id, c) = ctx.register_base(p)?;
        let k = rational_half_pow(&c, h)?;
        Ok(Self::base_factor(ctx, id, h).mul_scalar(&k).canonical())
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Factors, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, factors: Factors, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&factors) {
            Some(q) => {
                q.add_assign_ref(&p);
                if q.is_zero() {
                    self.terms.remove(&factors);
                }
            }
            None => {
                self.terms.insert(factors, p);
            }
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut out = self.clone();
        for (f, p) in &other.terms {
            out.add_term(f.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        Expr { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(f, p)| (f.clone(), p.neg_ref())).collect() }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        let mut out = Expr::zero(&self.ctx);
        for (f1, p1) in &self.terms {
            for (f2, p2) in &other.terms {
                out.add_term(merge_factors(f1, f2), p1.mul_ref(p2));
            }
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> Expr {
        let mut out = Expr::zero(&self.ctx);
        for (f, q) in &self.terms {
            out.add_term(f.clone(), q.mul_ref(p));
        }
        out
    }

    pub fn mul_scalar(&self, c: &Scalar) -> Expr {
        let mut out = Expr::zero(&self.ctx);
        for (f, q) in &self.terms {
            out.add_term(f.clone(), q.mul_coeff(c));
        }
        out
    }

    pub fn scale(&self, q: &Rational) -> Expr {
        let mut out = Expr::zero(&self.ctx);
        for (f, p) in &self.terms {
            out.add_term(f.clone(), p.scale(q));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Expr {
        let mut acc = Expr::one(&self.ctx);
        for _ in 0..k {
            acc = acc.mul(self).canonical();
        }
        acc
    }

    /// Integer power; negative powers need an invertible expression.
    pub fn powi(&self, k: i32) -> Result<Expr> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.try_inverse()?.pow(k.unsigned_abs()))
        }
    }

    /// Writes a single-term expression as `c * prod B^(h/2) * log(B)^k` with a
    /// constant `c`, recognising polynomial parts that are powers of registered bases.
    pub fn as_base_monomial(&self) -> Option<(Scalar, Factors)> {
        let c = self.canonical();
        if c.terms.len() != 1 {
            return None;
        }
        let (factors, poly) = c.terms.iter().next().unwrap();
        let mut factors = factors.clone();
        let mut rest = poly.clone();
        if !rest.is_constant() {
            for id in 0..self.ctx.base_count() as BaseId {
                let b = self.ctx.base(id).poly.clone();
                let mut k = 0;
                while let Some(q) = rest.div_exact(&b) {
                    rest = q;
                    k += 1;
                }
                if k > 0 {
                    factors = merge_factors(&factors, &[BaseFactor { base: id, half_exp: 2 * k, log_pow: 0 }]);
                    if rest.is_constant() {
                        break;
                    }
                }
            }
            if !rest.is_constant() {
                return None;
            }
        }
        Some((rest.constant_term(), factors))
    }

    /// Inverse of `c * prod B^(h/2)` with constant `c` and no logarithms.
    pub fn try_inverse(&self) -> Result<Expr> {
        let fail = || HftError::NonInvertibleExpr(crate::render::expr_text(&self.canonical()));
        let (c, factors) = self.as_base_monomial().ok_or_else(fail)?;
        if factors.iter().any(|f| f.log_pow > 0) {
            return Err(fail());
        }
        let inv: Factors =
            factors.iter().map(|f| BaseFactor { base: f.base, half_exp: -f.half_exp, log_pow: 0 }).collect();
        let k = c.inverse().map_err(|_| fail())?;
        Ok(Expr::from_term(&self.ctx, Poly::constant(k), inv).canonical())
    }

    pub fn checked_div(&self, other: &Expr) -> Result<Expr> {
        Ok(self.mul(&other.try_inverse()?).canonical())
    }

    /// Canonical form; equal functions have identical canonical forms.
    pub fn canonical(&self) -> Expr {
        let ctx = &self.ctx;
        let mut cache = PowCache::new(ctx);
        type Item = (Poly, BTreeMap<BaseId, i32>);
        let mut groups: BTreeMap<Vec<(BaseId, i32, u32)>, Vec<Item>> = BTreeMap::new();
        for (factors, poly) in &self.terms {
            let mut p = poly.clone();
            let mut exps = BTreeMap::new();
            let mut key = Vec::new();
            for f in factors {
                if f.log_pow == 0 && f.half_exp % 2 == 0 {
                    if f.half_exp > 0 {
                        p = p.mul_ref(&cache.get(f.base, (f.half_exp / 2) as u32));
                    } else {
                        exps.insert(f.base, f.half_exp);
                    }
                } else {
                    key.push((f.base, f.half_exp.rem_euclid(2), f.log_pow));
                    exps.insert(f.base, f.half_exp);
                }
            }
            groups.entry(key).or_default().push((p, exps));
        }
        let mut out = Expr::zero(ctx);
        for (key, items) in groups {
            let bases: BTreeSet<BaseId> = items.iter().flat_map(|(_, e)| e.keys().copied()).collect();
            let mins: BTreeMap<BaseId, i32> =
                bases.iter().map(|b| (*b, items.iter().map(|(_, e)| *e.get(b).unwrap_or(&0)).min().unwrap())).collect();
            let mut sum = Poly::zero();
            for (p, e) in &items {
                let mut t = p.clone();
                for (b, m) in &mins {
                    let k = (e.get(b).unwrap_or(&0) - m) / 2;
                    if k > 0 {
                        t = t.mul_ref(&cache.get(*b, k as u32));
                    }
                }
                sum.add_assign_ref(&t);
            }
            if sum.is_zero() {
                continue;
            }
            let mut factors: Factors = Vec::new();
            for (b, m) in &mins {
                let keyed = key.iter().find(|(kb, _, _)| kb == b);
                let bp = ctx.base(*b).poly.clone();
                let mut h = *m;
                loop {
                    if keyed.is_none() && h >= 0 {
                        break;
                    }
                    match sum.div_exact(&bp) {
                        Some(q) => {
                            sum = q;
                            h += 2;
                        }
                        None => break,
                    }
                }
                match keyed {
                    Some((_, _, lp)) => factors.push(BaseFactor { base: *b, half_exp: h, log_pow: *lp }),
                    None if h != 0 => factors.push(BaseFactor { base: *b, half_exp: h, log_pow: 0 }),
                    None => {}
                }
            }
            out.add_term(factors, sum);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.canonical().terms.is_empty()
    }

    /// Functional equality through canonical forms.
    pub fn equals(&self, other: &Expr) -> bool {
        self.sub(other).is_zero()
    }

    /// The polynomial when the canonical form has no base factors.
    pub fn as_polynomial(&self) -> Option<Poly> {
        let c = self.canonical();
        match c.terms.len() {
            0 => Some(Poly::zero()),
            1 => c.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn to_polynomial(&self) -> Result<Poly> {
        self.as_polynomial().ok_or(HftError::NonPolynomialInput)
    }

    pub fn is_polynomial(&self) -> bool {
        self.as_polynomial().is_some()
    }

    /// Bases occurring in the expression.
    pub fn bases(&self) -> BTreeSet<BaseId> {
        self.terms.keys().flat_map(|f| f.iter().map(|b| b.base)).collect()
    }

    /// Applies `f` to every polynomial part.
    pub fn map_polys(&self, f: impl Fn(&Poly) -> Poly) -> Expr {
        let mut out = Expr::zero(&self.ctx);
        for (fs, p) in &self.terms {
            out.add_term(fs.clone(), f(p));
        }
        out
    }

    /// Partial derivative in `v`.
    pub fn derivative(&self, v: Var) -> Expr {
        let mut out = Expr::zero(&self.ctx);
        for (factors, p) in &self.terms {
            out.add_term(factors.clone(), p.derivative(v));
            for (i, f) in factors.iter().enumerate() {
                let db = self.ctx.base(f.base).poly.derivative(v);
                if db.is_zero() {
                    continue;
                }
                let pdb = p.mul_ref(&db.to_coeff());
                let mut rest: Factors = factors.clone();
                rest.remove(i);
                if f.half_exp != 0 {
                    let nf = BaseFactor { base: f.base, half_exp: f.half_exp - 2, log_pow: f.log_pow };
                    let c = Rational::new(f.half_exp.into(), 2.into());
                    out.add_term(merge_factors(&rest, &[nf]), pdb.scale(&c));
                }
                if f.log_pow > 0 {
                    let nf = BaseFactor { base: f.base, half_exp: f.half_exp - 2, log_pow: f.log_pow - 1 };
                    out.add_term(merge_factors(&rest, &[nf]), pdb.scale(&Rational::from_integer(f.log_pow.into())));
                }
            }
        }
        out
    }

    /// Replaces polynomial variables by expressions; base factors are kept.
    pub fn substitute_poly_vars(&self, map: &dyn Fn(Var) -> Option<Expr>) -> Expr {
        let mut out = Expr::zero(&self.ctx);
        for (factors, p) in &self.terms {
            let sp = poly_substitute(&self.ctx, p, map);
            out = out.add(&sp.mul(&Expr::from_term(&self.ctx, Poly::one(), factors.clone())));
        }
        out
    }

    /// Exact value at a rational point covering every variable that occurs.
    pub fn eval_at(&self, point: &BTreeMap<Var, Rational>) -> Result<Scalar> {
        let lookup = |v: Var| {
            point
                .get(&v)
                .cloned()
                .ok_or_else(|| HftError::InvalidArgument(format!("no value for variable {}", self.ctx.var_name(v))))
        };
        let mut total = Scalar::zero();
        for (factors, p) in &self.terms {
            for v in p.vars() {
                lookup(v)?;
            }
            let mut val = p.eval_with(|v| Scalar::from_rational(point[&v].clone()), |c| c.clone());
            for f in factors {
                let base = self.ctx.base(f.base);
                for v in base.poly.vars() {
                    lookup(v)?;
                }
                let b = base.poly.eval_with(|v| point[&v].clone(), |c| c.clone());
                if (f.log_pow > 0 || f.half_exp % 2 != 0) && b.is_negative() {
                    return Err(HftError::NegativeBaseValue);
                }
                if b.is_zero() && (f.log_pow > 0 || f.half_exp < 0) {
                    return Err(HftError::ZeroBaseValue);
                }
                if b.is_zero() {
                    val = Scalar::zero();
                    break;
                }
                val = &val * &rational_half_pow(&b, f.half_exp)?;
                if f.log_pow > 0 {
                    val = &val * &Scalar::log_rational(&b)?.pow(f.log_pow);
                }
            }
            total = &total + &val;
        }
        Ok(total)
    }

    /// Floating-point value; `point` is indexed by variable.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut total = 0.0;
        for (factors, p) in &self.terms {
            let mut val = p.eval_with(|v| point[v as usize], |c| c.to_f64());
            for f in factors {
                let b = self
                    .ctx
                    .base(f.base)
                    .poly
                    .eval_with(|v| point[v as usize], |c| num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN));
                val *= b.powf(f.half_exp as f64 / 2.0);
                if f.log_pow > 0 {
                    val *= b.ln().powi(f.log_pow as i32);
                }
            }
            total += val;
        }
        total
    }

    /// Replaces `||x||` by the constant `r` (and `log ||x||^2` by `2 log r`).
    pub fn substitute_norm_radius(&self, r: &Scalar) -> Result<Expr> {
        let nb = self.ctx.norm_base();
        let r2 = r * r;
        let mut out = Expr::zero(&self.ctx);
        for (factors, p) in &self.terms {
            let mut k = Scalar::one();
            let mut rest: Factors = Vec::new();
            for f in factors {
                if f.base != nb {
                    rest.push(f.clone());
                    continue;
                }
                let h = f.half_exp;
                let mut part = if h % 2 == 0 {
                    let rp = r2.pow((h / 2).unsigned_abs());
                    if h < 0 {
                        rp.inverse().map_err(|_| HftError::OddPowerIrrationalRadius)?
                    } else {
                        rp
                    }
                } else {
                    if !r.is_single_term() {
                        return Err(HftError::OddPowerIrrationalRadius);
                    }
                    let rp = r.pow(h.unsigned_abs());
                    if h < 0 {
                        rp.inverse().map_err(|_| HftError::OddPowerIrrationalRadius)?
                    } else {
                        rp
                    }
                };
                if f.log_pow > 0 {
                    let rq = r
                        .as_rational()
                        .ok_or_else(|| HftError::UnsupportedBase("logarithm at an irrational radius".into()))?;
                    let l = Scalar::log_rational(&rq)?.scale_int(2);
                    part = &part * &l.pow(f.log_pow);
                }
                k = &k * &part;
            }
            out.add_term(rest, p.mul_coeff(&k));
        }
        Ok(out.canonical())
    }
}

/// `c^(h/2)` for a rational `c`.
pub fn rational_half_pow(c: &Rational, h: i32) -> Result<Scalar> {
    let int_pow = |q: &Rational, k: i32| -> Result<Rational> {
        if k < 0 && q.is_zero() {
            return Err(HftError::ZeroBaseValue);
        }
        Ok(if k >= 0 { num_traits::pow(q.clone(), k as usize) } else { num_traits::pow(q.recip(), (-k) as usize) })
    };
    if h % 2 == 0 {
        return Ok(Scalar::from_rational(int_pow(c, h / 2)?));
    }
    if c.is_negative() {
        return Err(HftError::NegativeBaseValue);
    }
    let k = (h - 1).div_euclid(2);
    Ok(Scalar::from_rational(int_pow(c, k)?) * Scalar::sqrt_rational(c)?)
}

/// Substitutes expressions for the variables of a polynomial.
pub fn poly_substitute(ctx: &Context, p: &Poly, map: &dyn Fn(Var) -> Option<Expr>) -> Expr {
    let mut cache: HashMap<(Var, u32), Expr> = HashMap::new();
    let mut out = Expr::zero(ctx);
    for (m, c) in p.terms() {
        let mut kept = Vec::new();
        let mut t = Expr::constant(ctx, c.clone());
        for &(v, e) in m.exps() {
            match map(v) {
                Some(x) => {
                    let xe = cache.entry((v, e)).or_insert_with(|| x.pow(e)).clone();
                    t = t.mul(&xe);
                }
                None => kept.push((v, e)),
            }
        }
        if !kept.is_empty() {
            t = t.mul_poly(&Poly::monomial(Monomial::from_exps(kept), Scalar::one()));
        }
        out = out.add(&t);
    }
    out.canonical()
}

/// Reduces modulo `sum x_i^2 = r2` by rewriting `x_n^2` as `r2 - sum_{i<n} x_i^2`.
pub fn restrict_to_sphere(ctx: &Context, p: &Poly, r2: &Rational) -> Poly {
    let n = ctx.dim();
    let last = ctx.coord(n - 1);
    let mut sub = Poly::from_rational(r2.clone());
    for i in 0..n - 1 {
        sub.add_term(Monomial::var_pow(ctx.coord(i), 2), &Scalar::from_int(-1));
    }
    let mut pows: Vec<Poly> = vec![Poly::one()];
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let (e, rest) = m.split_off(last);
        let k = (e / 2) as usize;
        while pows.len() <= k {
            let next = pows.last().unwrap().mul_ref(&sub);
            pows.push(next);
        }
        let mono = rest.mul(&Monomial::var_pow(last, e % 2));
        out.add_assign_ref(&pows[k].mul_monomial(&mono, c));
    }
    out
}

/// Unit-sphere restriction of an expression that is polynomial after `||x|| -> 1`.
pub fn restrict_expr_to_sphere(e: &Expr) -> Result<Poly> {
    let p = e.substitute_norm_radius(&Scalar::one())?.to_polynomial()?;
    Ok(restrict_to_sphere(e.ctx(), &p, &Rational::one()))
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.equals(other)
    }
}

macro_rules! expr_binop {
    ($tr:ident, $f:ident) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $f(self, rhs: &Expr) -> Expr {
                Expr::$f(self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr {
                Expr::$f(&self, &rhs)
            }
        }
    };
}

expr_binop!(Add, add);
expr_binop!(Sub, sub);
expr_binop!(Mul, mul);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
