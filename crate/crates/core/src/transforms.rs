//! Reflections in spheres and hyperplanes, the Kelvin transform, the modified
//! inversion `Phi` and the modified Kelvin transform.
//!
//! For `Phi` and `kelvin_h` the last coordinate plays the role of `y` in the
//! split form `(x, y)`; the south pole is `(0, ..., 0, -1)`.

use num_traits::{One, Zero};

use crate::context::Context;
use crate::error::{HftError, Result};
use crate::expr::{poly_substitute, rational_half_pow, BaseFactor, Expr};
use crate::poly::Monomial;
use crate::scalar::Scalar;
use crate::{Poly, QPoly, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum Mirror {
    UnitSphere,
    SphereAt { center: Vec<Rational>, radius: Rational },
    Hyperplane { b: Vec<Rational>, t: Rational },
}

impl Mirror {
    fn check(&self, n: usize) -> Result<()> {
        match self {
            Mirror::UnitSphere => Ok(()),
            Mirror::SphereAt { center, radius } => {
                if center.len() != n {
                    return Err(HftError::DimensionMismatch { expected: n, found: center.len() });
                }
                if *radius <= Rational::zero() {
                    return Err(HftError::InvalidArgument("sphere radius must be positive".into()));
                }
                Ok(())
            }
            Mirror::Hyperplane { b, .. } => {
                if b.len() != n {
                    return Err(HftError::DimensionMismatch { expected: n, found: b.len() });
                }
                if b.iter().all(Zero::is_zero) {
                    return Err(HftError::InvalidArgument("hyperplane normal must be nonzero".into()));
                }
                Ok(())
            }
        }
    }
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Reflection of a rational point.
pub fn reflect_point(x: &[Rational], m: &Mirror) -> Result<Vec<Rational>> {
    m.check(x.len())?;
    let sphere = |c: &[Rational], r2: Rational| {
        let d: Vec<Rational> = x.iter().zip(c).map(|(a, b)| a - b).collect();
        let d2: Rational = d.iter().map(|v| v * v).sum();
        if d2.is_zero() {
            return Err(HftError::CenterSingularity);
        }
        let k = r2 / d2;
        Ok(c.iter().zip(&d).map(|(ci, di)| ci + di * &k).collect())
    };
    match m {
        Mirror::UnitSphere => sphere(&vec![Rational::zero(); x.len()], Rational::one()),
        Mirror::SphereAt { center, radius } => sphere(center, radius * radius),
        Mirror::Hyperplane { b, t } => {
            let bx: Rational = b.iter().zip(x).map(|(u, v)| u * v).sum();
            let bb: Rational = b.iter().map(|v| v * v).sum();
            let k = (bx - t) * rat(2) / bb;
            Ok(x.iter().zip(b).map(|(xi, bi)| xi - bi * &k).collect())
        }
    }
}

/// Reflection of the coordinate vector, one component per coordinate.
pub fn reflect(ctx: &Context, m: &Mirror) -> Result<Vec<Expr>> {
    let n = ctx.dim();
    m.check(n)?;
    let x = |i: usize| QPoly::var(ctx.coord(i));
    let sphere = |c: &[Rational], r2: &Rational| -> Result<Vec<Expr>> {
        let d: Vec<QPoly> = (0..n).map(|i| x(i).sub_ref(&QPoly::constant(c[i].clone()))).collect();
        let mut d2 = QPoly::zero();
        for di in &d {
            d2 = d2.add_ref(&di.mul_ref(di));
        }
        let inv = Expr::base_pow(ctx, &d2, -2)?;
        Ok(d.iter()
            .zip(c)
            .map(|(di, ci)| inv.mul_poly(&di.scale(r2).to_coeff()).add(&Expr::rational(ctx, ci.clone())).canonical())
            .collect())
    };
    match m {
        Mirror::UnitSphere => sphere(&vec![Rational::zero(); n], &Rational::one()),
        Mirror::SphereAt { center, radius } => sphere(center, &(radius * radius)),
        Mirror::Hyperplane { b, t } => {
            let mut bx = QPoly::constant(-t.clone());
            for (i, bi) in b.iter().enumerate() {
                bx = bx.add_ref(&x(i).scale(bi));
            }
            let bb: Rational = b.iter().map(|v| v * v).sum();
            let k = bx.scale(&(rat(2) / bb));
            Ok((0..n).map(|i| Expr::from_qpoly(ctx, &x(i).sub_ref(&k.scale(&b[i])))).collect())
        }
    }
}

fn check_map(ctx: &Context, map: &[Expr]) -> Result<()> {
    if map.len() != ctx.dim() {
        return Err(HftError::DimensionMismatch { expected: ctx.dim(), found: map.len() });
    }
    Ok(())
}

/// `B^(h/2) log(B)^k` composed with a map, given `B` composed with the map.
fn factor_power(ctx: &Context, image: &Expr, f: &BaseFactor) -> Result<Expr> {
    let unsupported = || HftError::UnsupportedBase(format!("composition with {}", ctx.base_label(f.base)));
    let (c, fs) = image.as_base_monomial().ok_or_else(unsupported)?;
    if fs.iter().any(|g| g.log_pow > 0) {
        return Err(unsupported());
    }
    let q = c.as_rational().ok_or_else(unsupported)?;
    let mut out = Expr::constant(ctx, rational_half_pow(&q, f.half_exp)?);
    for g in &fs {
        let e = g.half_exp * f.half_exp;
        if e % 2 != 0 {
            return Err(unsupported());
        }
        out = out.mul(&Expr::base_factor(ctx, g.base, e / 2));
    }
    if f.log_pow > 0 {
        let mut log = Expr::constant(ctx, Scalar::log_rational(&q)?);
        for g in &fs {
            log = log.add(&Expr::base_log(ctx, g.base, 1).scale(&Rational::new(g.half_exp.into(), 2.into())));
        }
        out = out.mul(&log.pow(f.log_pow));
    }
    Ok(out.canonical())
}

/// `u(map(x))`; base factors must compose to base monomials.
pub fn compose(u: &Expr, map: &[Expr]) -> Result<Expr> {
    let ctx = u.ctx();
    check_map(ctx, map)?;
    let sub = |v| ctx.is_coord(v).then(|| map[v as usize].clone());
    let mut images: std::collections::BTreeMap<u32, Expr> = Default::default();
    let mut out = Expr::zero(ctx);
    for (factors, p) in u.terms() {
        let mut term = poly_substitute(ctx, p, &sub);
        for f in factors {
            let image = match images.get(&f.base) {
                Some(e) => e.clone(),
                None => {
                    let b: Poly = ctx.base(f.base).poly.to_coeff();
                    let e = poly_substitute(ctx, &b, &sub).canonical();
                    images.insert(f.base, e.clone());
                    e
                }
            };
            term = term.mul(&factor_power(ctx, &image, f)?);
        }
        out = out.add(&term);
    }
    Ok(out.canonical())
}

/// `||x||^(2-n) u(x / ||x||^2)`.
pub fn kelvin(u: &Expr) -> Result<Expr> {
    let ctx = u.ctx();
    let nb = ctx.norm_base();
    let n = ctx.dim() as i32;
    let inv = Expr::norm_pow(ctx, -2);
    let sub = |v| ctx.is_coord(v).then(|| Expr::var(ctx, v).mul(&inv));
    let mut out = Expr::zero(ctx);
    for (factors, p) in u.terms() {
        let mut fs = Vec::with_capacity(factors.len());
        let mut sign = 1;
        for f in factors {
            if f.base == nb {
                if f.log_pow % 2 == 1 {
                    sign = -sign;
                }
                fs.push(BaseFactor { base: nb, half_exp: -f.half_exp, log_pow: f.log_pow });
            } else if ctx.base(f.base).poly.vars().iter().any(|v| ctx.is_coord(*v)) {
                return Err(HftError::UnsupportedBase(format!("Kelvin transform of {}", ctx.base_label(f.base))));
            } else {
                fs.push(f.clone());
            }
        }
        let term = poly_substitute(ctx, p, &sub).mul(&Expr::from_term(ctx, Poly::one(), fs));
        out = out.add(&term.scale(&rat(sign)));
    }
    Ok(out.mul(&Expr::norm_pow(ctx, 2 - n)).canonical())
}

/// `||z - s||^2` with `s` the south pole.
pub fn south_pole_distance(ctx: &Context) -> QPoly {
    let n = ctx.dim();
    let mut q = QPoly::zero();
    for i in 0..n {
        let mut zi = QPoly::var(ctx.coord(i));
        if i + 1 == n {
            zi = zi.add_ref(&QPoly::one());
        }
        q = q.add_ref(&zi.mul_ref(&zi));
    }
    q
}

/// `Phi(z) = 2 (z - s) / ||z - s||^2 + s`.
pub fn phi_map(ctx: &Context) -> Result<Vec<Expr>> {
    let n = ctx.dim();
    if n == 0 {
        return Err(HftError::UnsupportedDimension(0));
    }
    let inv = Expr::base_pow(ctx, &south_pole_distance(ctx), -2)?;
    Ok((0..n)
        .map(|i| {
            let v = ctx.coord(i);
            let mut num = Poly::monomial(Monomial::var(v), Scalar::from_int(2));
            if i + 1 == n {
                num = num.add_ref(&Poly::from_int(2));
                inv.mul_poly(&num).sub(&Expr::one(ctx)).canonical()
            } else {
                inv.mul_poly(&num).canonical()
            }
        })
        .collect())
}

/// `2^((n-2)/2) ||z - s||^(2-n) u(Phi(z))`.
pub fn kelvin_h(u: &Expr) -> Result<Expr> {
    let ctx = u.ctx();
    let n = ctx.dim() as i32;
    let phi = phi_map(ctx)?;
    let k = rational_half_pow(&rat(2), n - 2)?;
    let q = Expr::base_pow(ctx, &south_pole_distance(ctx), 2 - n)?;
    Ok(compose(u, &phi)?.mul(&q).mul_scalar(&k).canonical())
}
