//! Exact integration over spheres, balls and ellipsoids.
//!
//! Sphere integrals use normalized surface measure; ball and ellipsoid
//! integrals use Lebesgue measure. Variables other than the coordinates pass
//! through as polynomial parameters.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{double_factorial, factorial};
use crate::context::Context;
use crate::error::{HftError, Result};
use crate::expr::{rational_half_pow, Expr};
use crate::poly::Monomial;
use crate::scalar::Scalar;
use crate::{Poly, Rational};

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> Scalar {
    let k = (n / 2) as i64;
    if n.is_multiple_of(2) {
        Scalar::pi_half_pow(2 * k as i32).scale(&Rational::new(BigInt::one(), factorial(k as u64)))
    } else {
        let num = BigInt::from(2).pow((k + 1) as u32);
        Scalar::pi_half_pow(2 * k as i32).scale(&Rational::new(num, double_factorial(2 * k + 1)))
    }
}

/// Surface area of the unit sphere in `R^n`, equal to `n V(n)`.
pub fn unit_sphere_area(n: usize) -> Scalar {
    unit_ball_volume(n).scale(&rat(n as i64))
}

/// Normalized sphere integral of `x^alpha`.
pub fn sphere_monomial(alpha: &[u32], n: usize) -> Rational {
    if alpha.iter().any(|a| a % 2 == 1) {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    for a in alpha {
        num *= double_factorial(*a as i64 - 1);
    }
    let half: u32 = alpha.iter().sum::<u32>() / 2;
    let mut den = BigInt::one();
    for j in 0..half {
        den *= n as i64 + 2 * j as i64;
    }
    Rational::new(num, den)
}

/// Normalized sphere integral over the coordinates.
pub fn integrate_sphere_poly(p: &Poly, ctx: &Context) -> Poly {
    let n = ctx.dim();
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let alpha: Vec<u32> = ctx.coords().iter().map(|v| m.exp(*v)).collect();
        let w = sphere_monomial(&alpha, n);
        if w.is_zero() {
            continue;
        }
        let rest = Monomial::from_exps(m.exps().iter().copied().filter(|(v, _)| !ctx.is_coord(*v)));
        out.add_term(rest, &c.scale(&w));
    }
    out
}

fn constant_of(p: Poly) -> Result<Scalar> {
    if !p.is_constant() {
        return Err(HftError::InvalidArgument("integrand depends on non-coordinate variables".into()));
    }
    Ok(p.constant_term())
}

/// Normalized sphere integral of a polynomial in the coordinates only.
pub fn integrate_sphere(p: &Poly, ctx: &Context) -> Result<Scalar> {
    constant_of(integrate_sphere_poly(p, ctx))
}

/// Normalized sphere integral of an expression; norms are 1 on the sphere.
pub fn integrate_sphere_expr(e: &Expr) -> Result<Poly> {
    let p = e.substitute_norm_radius(&Scalar::one())?.to_polynomial()?;
    Ok(integrate_sphere_poly(&p, e.ctx()))
}

/// `coeff * r^power * log(r)^log_pow`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTerm {
    pub coeff: Scalar,
    pub power: i32,
    pub log_pow: u32,
}

/// Sum of radial terms, optionally divided by `c0 + c1 r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub terms: Vec<RadialTerm>,
    pub denom: Option<(Rational, Rational)>,
}

impl RadialFunction {
    pub fn one() -> Self {
        Self::power(0)
    }

    pub fn power(a: i32) -> Self {
        RadialFunction { terms: vec![RadialTerm { coeff: Scalar::one(), power: a, log_pow: 0 }], denom: None }
    }

    /// Polynomial in `r` from `(power, coeff)` pairs.
    pub fn polynomial(coeffs: &[(i32, Rational)]) -> Self {
        RadialFunction {
            terms: coeffs
                .iter()
                .map(|(a, c)| RadialTerm { coeff: Scalar::from_rational(c.clone()), power: *a, log_pow: 0 })
                .collect(),
            denom: None,
        }
    }

    pub fn over_linear(mut self, c0: Rational, c1: Rational) -> Self {
        self.denom = Some((c0, c1));
        self
    }
}

/// `int_0^1 r^e log(r)^k dr`.
fn power_log_moment(e: i64, k: u32) -> Result<Rational> {
    if e <= -1 {
        return Err(HftError::DivergentRadialIntegral);
    }
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    let num = factorial(k as u64) * sign;
    let den = BigInt::from(e + 1).pow(k + 1);
    Ok(Rational::new(num, den))
}

/// `int_0^1 r^e / (c0 + c1 r) dr` by the recurrence in `e`.
fn linear_moment(e: i64, c0: &Rational, c1: &Rational) -> Result<Scalar> {
    if e < 0 {
        return Err(HftError::DivergentRadialIntegral);
    }
    if !c0.is_positive() || !(c0 + c1).is_positive() {
        return Err(HftError::UnsupportedRadialClass("denominator vanishes on [0, 1]".into()));
    }
    if c1.is_zero() {
        return Ok(Scalar::from_rational(Rational::new(BigInt::one(), (e + 1).into()) / c0));
    }
    let inv = c1.recip();
    let mut j = Scalar::log_rational(&((c0 + c1) / c0))?.scale(&inv);
    for m in 1..=e {
        let first = Scalar::from_rational(Rational::new(BigInt::one(), m.into()));
        j = (first - j.scale(c0)).scale(&inv);
    }
    Ok(j)
}

/// `int_0^1 r^e * radial(r) dr`.
pub fn radial_moment(e: i64, radial: &RadialFunction) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for t in &radial.terms {
        let ee = e + t.power as i64;
        let v = match &radial.denom {
            None => Scalar::from_rational(power_log_moment(ee, t.log_pow)?),
            Some((c0, c1)) => {
                if t.log_pow > 0 {
                    return Err(HftError::UnsupportedRadialClass("logarithm over a linear denominator".into()));
                }
                linear_moment(ee, c0, c1)?
            }
        };
        acc = acc + &t.coeff * &v;
    }
    Ok(acc)
}

/// Lebesgue integral of `p(x) * radial(||x||)` over the unit ball.
pub fn integrate_ball_poly(p: &Poly, radial: &RadialFunction, ctx: &Context) -> Result<Poly> {
    let n = ctx.dim();
    let area = unit_sphere_area(n);
    let mut out = Poly::zero();
    for (m, part) in p.homogeneous_parts_in(|v| ctx.is_coord(v)) {
        let s = integrate_sphere_poly(&part, ctx);
        if s.is_zero() {
            continue;
        }
        let rm = radial_moment(n as i64 - 1 + m as i64, radial)?;
        out.add_assign_ref(&s.mul_coeff(&(&area * &rm)));
    }
    Ok(out)
}

pub fn integrate_ball(p: &Poly, radial: &RadialFunction, ctx: &Context) -> Result<Scalar> {
    constant_of(integrate_ball_poly(p, radial, ctx)?)
}

/// Ball integral of an expression whose only bases are the coordinate norm,
/// optionally divided by `c0 + c1 ||x||`.
pub fn integrate_ball_expr(e: &Expr, denom: Option<(Rational, Rational)>) -> Result<Poly> {
    let ctx = e.ctx();
    let nb = ctx.norm_base();
    let mut out = Poly::zero();
    for (factors, p) in e.canonical().terms() {
        let (mut power, mut log_pow) = (0, 0);
        for f in factors {
            if f.base != nb {
                return Err(HftError::UnsupportedRadialClass(ctx.base_label(f.base)));
            }
            power = f.half_exp;
            log_pow = f.log_pow;
        }
        // log(||x||^2)^k = 2^k log(r)^k
        let coeff = Scalar::from_rational(num_traits::pow(rat(2), log_pow as usize));
        let radial = RadialFunction { terms: vec![RadialTerm { coeff, power, log_pow }], denom: denom.clone() };
        out.add_assign_ref(&integrate_ball_poly(p, &radial, ctx)?);
    }
    Ok(out)
}

/// Ellipsoid `{sum b_i x_i^2 + sum c_i x_i + d < 0}` in centred form.
struct Ellipsoid {
    centre: Vec<Rational>,
    rho2: Rational,
    inv_sqrt_b: Vec<Scalar>,
    jacobian: Scalar,
}

fn ellipsoid(b: &[Rational], c: &[Rational], d: &Rational, n: usize) -> Result<Ellipsoid> {
    if b.len() != n || c.len() != n {
        return Err(HftError::DimensionMismatch { expected: n, found: b.len().min(c.len()) });
    }
    if b.iter().any(|bi| !bi.is_positive()) {
        return Err(HftError::NonPositiveAxis);
    }
    let centre: Vec<Rational> = b.iter().zip(c).map(|(bi, ci)| -ci / (rat(2) * bi)).collect();
    let rho2 = b.iter().zip(c).map(|(bi, ci)| ci * ci / (rat(4) * bi)).fold(Rational::zero(), |a, x| a + x) - d;
    if !rho2.is_positive() {
        return Err(HftError::EmptyInterior);
    }
    let inv_sqrt_b = b.iter().map(|bi| Scalar::sqrt_rational(&bi.recip())).collect::<Result<Vec<_>>>()?;
    let prod_b = b.iter().fold(Rational::one(), |a, x| a * x);
    let jacobian = Scalar::sqrt_rational(&prod_b.recip())?;
    Ok(Ellipsoid { centre, rho2, inv_sqrt_b, jacobian })
}

/// `sum_k rho^k * int_B p_k(u) du` split by degree `k`, with `x = z + u / sqrt(b)`.
fn ellipsoid_moments(p: &Poly, e: &Ellipsoid, ctx: &Context) -> Result<Vec<(u32, Poly)>> {
    let n = ctx.dim();
    let moved = p.substitute(|v| {
        if ctx.is_coord(v) {
            let i = v as usize;
            let mut s = Poly::var(v).mul_coeff(&e.inv_sqrt_b[i]);
            s.add_term(Monomial::one(), &Scalar::from_rational(e.centre[i].clone()));
            Some(s)
        } else {
            None
        }
    });
    let area = unit_sphere_area(n);
    let mut out = Vec::new();
    for (k, part) in moved.homogeneous_parts_in(|v| ctx.is_coord(v)) {
        let s = integrate_sphere_poly(&part, ctx);
        if s.is_zero() {
            continue;
        }
        let w = area.scale(&Rational::new(BigInt::one(), BigInt::from(n as u64 + k as u64)));
        out.push((k, s.mul_coeff(&w)));
    }
    Ok(out)
}

/// Lebesgue integral over the ellipsoid `{q < 0}`.
pub fn integrate_ellipsoid_volume_poly(
    p: &Poly,
    b: &[Rational],
    c: &[Rational],
    d: &Rational,
    ctx: &Context,
) -> Result<Poly> {
    let n = ctx.dim();
    let e = ellipsoid(b, c, d, n)?;
    let mut out = Poly::zero();
    for (k, v) in ellipsoid_moments(p, &e, ctx)? {
        let rho = rational_half_pow(&e.rho2, (n + k as usize) as i32)?;
        out.add_assign_ref(&v.mul_coeff(&(&rho * &e.jacobian)));
    }
    Ok(out)
}

/// `int_{q=0} p / ||grad q|| dA`, the `t`-derivative at 0 of the integral over `{q < t}`.
pub fn integrate_ellipsoid_area_poly(
    p: &Poly,
    b: &[Rational],
    c: &[Rational],
    d: &Rational,
    ctx: &Context,
) -> Result<Poly> {
    let n = ctx.dim();
    let e = ellipsoid(b, c, d, n)?;
    let mut out = Poly::zero();
    for (k, v) in ellipsoid_moments(p, &e, ctx)? {
        let j = (n + k as usize) as i32;
        let rho = rational_half_pow(&e.rho2, j - 2)?.scale(&Rational::new(j.into(), 2.into()));
        out.add_assign_ref(&v.mul_coeff(&(&rho * &e.jacobian)));
    }
    Ok(out)
}

pub fn integrate_ellipsoid_volume(
    p: &Poly,
    b: &[Rational],
    c: &[Rational],
    d: &Rational,
    ctx: &Context,
) -> Result<Scalar> {
    constant_of(integrate_ellipsoid_volume_poly(p, b, c, d, ctx)?)
}

pub fn integrate_ellipsoid_area(
    p: &Poly,
    b: &[Rational],
    c: &[Rational],
    d: &Rational,
    ctx: &Context,
) -> Result<Scalar> {
    constant_of(integrate_ellipsoid_area_poly(p, b, c, d, ctx)?)
}
