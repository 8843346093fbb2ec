//! Harmonic polynomials: dimensions, decomposition, bases and zonal harmonics.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::binomial;
use crate::calculus::poly_laplacian;
use crate::context::Context;
use crate::error::{HftError, Result};
use crate::expr::Expr;
use crate::integrate::{integrate_ball_poly, integrate_sphere_poly, RadialFunction};
use crate::linalg::{nullspace, Row};
use crate::poly::{Monomial, Var};
use crate::scalar::Scalar;
use crate::{Poly, Rational};

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Dimension of the space of harmonic polynomials on `R^n` homogeneous of degree `m`.
pub fn dim_harmonic(m: u64, n: u64) -> BigInt {
    match m {
        0 => BigInt::one(),
        1 => BigInt::from(n),
        _ => {
            let (m, n) = (m as i64, n as i64);
            binomial(n + m - 1, n - 1) - binomial(n + m - 3, n - 1)
        }
    }
}

/// `sum_k h_k ||x||^(exp_k)` with each `h_k` harmonic, sorted by `exp`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicDecomposition {
    pub pairs: Vec<(Poly, u32)>,
}

impl HarmonicDecomposition {
    pub fn to_expr(&self, ctx: &Context) -> Expr {
        let mut acc = Expr::zero(ctx);
        for (h, e) in &self.pairs {
            acc = acc.add(&Expr::from_poly(ctx, h.clone()).mul(&Expr::norm_pow(ctx, *e as i32)));
        }
        acc.canonical()
    }

    /// Restriction to the unit sphere, grouped by homogeneous degree.
    pub fn sphere_parts(&self, ctx: &Context) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (h, _) in &self.pairs {
            for (d, part) in h.homogeneous_parts_in(|v| ctx.is_coord(v)) {
                out.entry(d).or_default().add_assign_ref(&part);
            }
        }
        out.retain(|_, p| !p.is_zero());
        out
    }
}

fn norm_sq_poly(ctx: &Context) -> Poly {
    let mut s = Poly::zero();
    for v in ctx.coords() {
        s.add_term(Monomial::var_pow(v, 2), &Scalar::one());
    }
    s
}

/// Decomposition of a homogeneous polynomial of degree `m`, as `(h, k)` with
/// `h` harmonic of degree `m - 2k` multiplying `||x||^(2k)`.
fn decompose_homogeneous(p: &Poly, m: u32, ctx: &Context, out: &mut Vec<(Poly, u32)>) {
    let n = ctx.dim() as i64;
    let s = norm_sq_poly(ctx);
    let mut cur = p.clone();
    let mut deg = m as i64;
    let mut k = 0u32;
    while !cur.is_zero() {
        // h = sum_j c_j ||x||^(2j) Laplacian^j cur
        let mut h = cur.clone();
        let mut rest = Poly::zero();
        let mut c = rat(1);
        let mut lap = cur.clone();
        let mut spow = Poly::one();
        let mut j = 0i64;
        loop {
            lap = poly_laplacian(&lap, ctx);
            if lap.is_zero() {
                break;
            }
            c = -c / rat(2 * (j + 1) * (n + 2 * deg - 2 * j - 4));
            j += 1;
            // rest collects -sum_{j>=1} c_j ||x||^(2j-2) Laplacian^j cur
            let term = spow.mul_ref(&lap).scale(&c);
            rest.add_assign_ref(&term.neg_ref());
            spow = spow.mul_ref(&s);
            h.add_assign_ref(&spow.mul_ref(&lap).scale(&c));
        }
        if !h.is_zero() {
            out.push((h, k));
        }
        cur = rest;
        deg -= 2;
        k += 1;
    }
}

/// Unique decomposition of `p` into harmonic polynomials times even norm powers.
pub fn harmonic_decompose(p: &Poly, ctx: &Context) -> HarmonicDecomposition {
    let mut raw = Vec::new();
    for (m, part) in p.homogeneous_parts_in(|v| ctx.is_coord(v)) {
        decompose_homogeneous(&part, m, ctx, &mut raw);
    }
    let mut grouped: BTreeMap<u32, Poly> = BTreeMap::new();
    for (h, k) in raw {
        grouped.entry(2 * k).or_default().add_assign_ref(&h);
    }
    HarmonicDecomposition { pairs: grouped.into_iter().filter(|(_, h)| !h.is_zero()).map(|(e, h)| (h, e)).collect() }
}

/// Homogeneous harmonic components `g_m` of `p` restricted to the unit sphere.
pub fn sphere_harmonic_parts(p: &Poly, ctx: &Context) -> BTreeMap<u32, Poly> {
    harmonic_decompose(p, ctx).sphere_parts(ctx)
}

/// All monomials of degree `m` in `vars`, in descending term order.
pub fn monomials_of_degree(vars: &[Var], m: u32) -> Vec<Monomial> {
    fn rec(vars: &[Var], m: u32, acc: &mut Vec<(Var, u32)>, out: &mut Vec<Monomial>) {
        match vars {
            [] => {
                if m == 0 {
                    out.push(Monomial::from_exps(acc.iter().copied()));
                }
            }
            [v, rest @ ..] => {
                for e in (0..=m).rev() {
                    if e > 0 {
                        acc.push((*v, e));
                    }
                    rec(rest, m - e, acc, out);
                    if e > 0 {
                        acc.pop();
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, m, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Scale a rational vector to coprime integers with positive first nonzero entry.
fn primitive_vector(v: &[Rational]) -> Vec<Rational> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map(|x| x.signum()).unwrap_or_else(BigInt::one);
    ints.into_iter().map(|x| Rational::from_integer(x / &g * &sign)).collect()
}

/// Inner product on polynomials used for Gram-Schmidt.
pub trait InnerProduct {
    fn name(&self) -> &str;
    fn inner(&self, p: &Poly, q: &Poly, ctx: &Context) -> Result<Scalar>;
}

/// `L^2` of normalized surface measure on the unit sphere.
pub struct SphereIP;

/// `L^2` of volume measure on the unit ball.
pub struct BallIP;

/// `L^2(B, w(||x||) dV)` for a radial weight.
pub struct WeightedBallIP(pub RadialFunction);

/// Inner product given by a closure.
pub struct FnInnerProduct<F> {
    pub name: String,
    pub f: F,
}

fn constant(p: Poly) -> Result<Scalar> {
    if !p.is_constant() {
        return Err(HftError::InvalidArgument("inner product depends on non-coordinate variables".into()));
    }
    Ok(p.constant_term())
}

impl InnerProduct for SphereIP {
    fn name(&self) -> &str {
        "sphere"
    }
    fn inner(&self, p: &Poly, q: &Poly, ctx: &Context) -> Result<Scalar> {
        constant(integrate_sphere_poly(&p.mul_ref(q), ctx))
    }
}

impl InnerProduct for BallIP {
    fn name(&self) -> &str {
        "ball"
    }
    fn inner(&self, p: &Poly, q: &Poly, ctx: &Context) -> Result<Scalar> {
        constant(integrate_ball_poly(&p.mul_ref(q), &RadialFunction::one(), ctx)?)
    }
}

impl InnerProduct for WeightedBallIP {
    fn name(&self) -> &str {
        "weighted-ball"
    }
    fn inner(&self, p: &Poly, q: &Poly, ctx: &Context) -> Result<Scalar> {
        constant(integrate_ball_poly(&p.mul_ref(q), &self.0, ctx)?)
    }
}

impl<F> InnerProduct for FnInnerProduct<F>
where
    F: Fn(&Poly, &Poly, &Context) -> Result<Scalar>,
{
    fn name(&self) -> &str {
        &self.name
    }
    fn inner(&self, p: &Poly, q: &Poly, ctx: &Context) -> Result<Scalar> {
        (self.f)(p, q, ctx)
    }
}

/// Kernel of the Laplacian on homogeneous polynomials of degree `m`, each
/// basis element with coprime integer coefficients.
pub fn basis_harmonic_plain(m: u32, ctx: &Context) -> Vec<Poly> {
    let coords = ctx.coords();
    let cols = monomials_of_degree(&coords, m);
    let rows_mono = if m >= 2 { monomials_of_degree(&coords, m - 2) } else { Vec::new() };
    let row_index: BTreeMap<Monomial, usize> = rows_mono.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let mut rows: Vec<Row> = vec![Row::new(); rows_mono.len()];
    for (j, mono) in cols.iter().enumerate() {
        let lap = poly_laplacian(&Poly::monomial(mono.clone(), Scalar::one()), ctx);
        for (rm, c) in lap.terms() {
            let q = c.as_rational().expect("rational Laplacian coefficient");
            rows[row_index[rm]].insert(j, q);
        }
    }
    nullspace(rows, cols.len())
        .into_iter()
        .map(|v| {
            let v = primitive_vector(&v);
            let mut p = Poly::zero();
            for (c, mono) in v.into_iter().zip(&cols) {
                if !c.is_zero() {
                    p.add_term(mono.clone(), &Scalar::from_rational(c));
                }
            }
            p
        })
        .collect()
}

/// Basis of `H_m`, orthonormalized by Gram-Schmidt when an inner product is given.
pub fn basis_harmonic(m: u32, ctx: &Context, ip: Option<&dyn InnerProduct>) -> Result<Vec<Poly>> {
    let plain = basis_harmonic_plain(m, ctx);
    let Some(ip) = ip else { return Ok(plain) };
    gram_schmidt(&plain, ctx, ip)
}

/// Gram-Schmidt on linearly independent polynomials; orthogonalizes before normalizing
/// so that only single-term squared norms need square roots.
pub fn gram_schmidt(vs: &[Poly], ctx: &Context, ip: &dyn InnerProduct) -> Result<Vec<Poly>> {
    let mut ortho: Vec<(Poly, Scalar)> = Vec::new();
    for v in vs {
        let mut u = v.clone();
        for (w, ww) in &ortho {
            let c = ip.inner(v, w, ctx)?.checked_div(ww)?;
            u = u.sub_ref(&w.mul_coeff(&c));
        }
        let uu = ip.inner(&u, &u, ctx)?;
        if uu.is_zero() {
            return Err(HftError::Internal("dependent vectors in Gram-Schmidt".into()));
        }
        if !uu.is_single_term() {
            return Err(HftError::UnsupportedScalarNorm(uu.to_string()));
        }
        ortho.push((u, uu));
    }
    ortho
        .into_iter()
        .map(|(u, uu)| {
            let norm = uu.sqrt().map_err(|_| HftError::UnsupportedScalarNorm(uu.to_string()))?;
            Ok(u.mul_coeff(&norm.inverse()?))
        })
        .collect()
}

/// `Z_m(x, y) = sum_k c_k (x.y)^(m-2k) (||x||^2 ||y||^2)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalHarmonic {
    pub m: u32,
    pub n: usize,
    pub coeffs: Vec<Rational>,
}

pub fn zonal_harmonic(m: u32, n: usize) -> ZonalHarmonic {
    let (mi, ni) = (m as i64, n as i64);
    let mut rel = vec![rat(1)];
    for k in 0..(mi / 2) {
        let prev = rel[k as usize].clone();
        let num = (mi - 2 * k) * (mi - 2 * k - 1);
        let den = 2 * (k + 1) * (ni + 2 * mi - 2 * k - 4);
        rel.push(-prev * Rational::new(num.into(), den.into()));
    }
    let total = rel.iter().fold(Rational::zero(), |a, c| a + c);
    let scale = Rational::from_integer(dim_harmonic(m as u64, n as u64)) / total;
    ZonalHarmonic { m, n, coeffs: rel.into_iter().map(|c| c * &scale).collect() }
}

impl ZonalHarmonic {
    /// Expand over variable lists `x` and `y`; `x_unit`/`y_unit` set the
    /// corresponding squared norm to 1.
    pub fn expand(&self, x: &[Var], y: &[Var], x_unit: bool, y_unit: bool) -> Poly {
        let sq = |vs: &[Var]| {
            let mut s = Poly::zero();
            for v in vs {
                s.add_term(Monomial::var_pow(*v, 2), &Scalar::one());
            }
            s
        };
        let mut t = Poly::zero();
        for (a, b) in x.iter().zip(y) {
            t.add_term(Monomial::var(*a).mul(&Monomial::var(*b)), &Scalar::one());
        }
        let xx = if x_unit { Poly::one() } else { sq(x) };
        let yy = if y_unit { Poly::one() } else { sq(y) };
        let s = xx.mul_ref(&yy);
        let mut out = Poly::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let term = t.pow(self.m - 2 * k as u32).mul_ref(&s.pow(k as u32)).scale(c);
            out.add_assign_ref(&term);
        }
        out
    }
}
