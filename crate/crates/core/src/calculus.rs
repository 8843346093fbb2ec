//! Derivatives, normal derivatives, homogeneous expansions, harmonic conjugates.

use num_traits::One;

use crate::context::Context;
use crate::error::{HftError, Result};
use crate::expr::{restrict_to_sphere, Expr};
use crate::poly::Var;
use crate::scalar::Scalar;
use crate::{Poly, QPoly, Rational};

/// Applies `d^k / d v^k` for each `(v, k)` in turn.
pub fn partial_d(e: &Expr, schedule: &[(Var, u32)]) -> Expr {
    let mut out = e.clone();
    for &(v, k) in schedule {
        for _ in 0..k {
            out = out.derivative(v).canonical();
        }
    }
    out
}

pub fn gradient(e: &Expr) -> Vec<Expr> {
    e.ctx().coords().into_iter().map(|v| e.derivative(v).canonical()).collect()
}

/// `Delta^power` in the coordinates.
pub fn laplacian(e: &Expr, power: u32) -> Expr {
    let mut out = e.canonical();
    for _ in 0..power {
        let mut acc = Expr::zero(e.ctx());
        for v in e.ctx().coords() {
            acc = acc.add(&out.derivative(v).derivative(v));
        }
        out = acc.canonical();
    }
    out
}

/// Laplacian of a polynomial in the coordinates.
pub fn poly_laplacian(p: &Poly, ctx: &Context) -> Poly {
    let mut acc = Poly::zero();
    for v in ctx.coords() {
        acc.add_assign_ref(&p.derivative(v).derivative(v));
    }
    acc
}

pub fn divergence(fields: &[Expr]) -> Result<Expr> {
    let ctx = fields.first().map(|f| f.ctx().clone()).ok_or(HftError::DimensionMismatch { expected: 1, found: 0 })?;
    if fields.len() != ctx.dim() {
        return Err(HftError::DimensionMismatch { expected: ctx.dim(), found: fields.len() });
    }
    let mut acc = Expr::zero(&ctx);
    for (f, v) in fields.iter().zip(ctx.coords()) {
        acc = acc.add(&f.derivative(v));
    }
    Ok(acc.canonical())
}

/// Rows are components, columns are coordinates.
pub fn jacobian(fields: &[Expr]) -> Vec<Vec<Expr>> {
    fields.iter().map(gradient).collect()
}

pub fn dot(a: &[Expr], b: &[Expr]) -> Expr {
    let ctx = a[0].ctx();
    let mut acc = Expr::zero(ctx);
    for (u, v) in a.iter().zip(b) {
        acc = acc.add(&u.mul(v));
    }
    acc.canonical()
}

/// `x . grad e` with `||x|| -> 1`; polynomial results are reduced modulo the sphere.
pub fn normal_d_sphere(e: &Expr) -> Result<Expr> {
    let ctx = e.ctx();
    let mut acc = Expr::zero(ctx);
    for v in ctx.coords() {
        acc = acc.add(&e.derivative(v).mul_poly(&Poly::var(v)));
    }
    let on_sphere = acc.canonical().substitute_norm_radius(&Scalar::one())?;
    Ok(match on_sphere.as_polynomial() {
        Some(p) => Expr::from_poly(ctx, restrict_to_sphere(ctx, &p, &Rational::from_integer(1.into()))),
        None => on_sphere,
    })
}

/// Outward normal derivative on `{q = 0}`: `(grad e . grad q) / ||grad q||`.
pub fn normal_d_surface(e: &Expr, q: &QPoly) -> Result<Expr> {
    let ctx = e.ctx();
    let mut gq2 = QPoly::zero();
    for v in ctx.coords() {
        let d = q.derivative(v);
        gq2 = gq2.add_ref(&d.mul_ref(&d));
    }
    if gq2.is_zero() {
        return Err(HftError::ZeroGradientField);
    }
    let inv_norm = Expr::base_pow(ctx, &gq2, -1)?;
    let mut num = Expr::zero(ctx);
    for v in ctx.coords() {
        num = num.add(&e.derivative(v).mul_poly(&q.derivative(v).to_coeff()));
    }
    Ok(num.mul(&inv_norm).canonical())
}

fn shift(p: &Poly, ctx: &Context, about: &[Poly], sign: i64) -> Poly {
    p.substitute(|v| {
        if ctx.is_coord(v) {
            Some(Poly::var(v).add_ref(&about[v as usize].scale(&Rational::from_integer(sign.into()))))
        } else {
            None
        }
    })
}

/// Degree-`m` term of the expansion of `p` about `about` (the origin by default).
pub fn homogeneous_part(p: &Poly, m: u32, ctx: &Context, about: Option<&[Poly]>) -> Result<Poly> {
    match about {
        None => Ok(p.homogeneous_part_in(m, |v| ctx.is_coord(v))),
        Some(b) => {
            if b.len() != ctx.dim() {
                return Err(HftError::DimensionMismatch { expected: ctx.dim(), found: b.len() });
            }
            let shifted = shift(p, ctx, b, 1).homogeneous_part_in(m, |v| ctx.is_coord(v));
            Ok(shift(&shifted, ctx, b, -1))
        }
    }
}

/// Sum of the expansion terms of degree at most `m`.
pub fn taylor_poly(p: &Poly, m: u32, ctx: &Context, about: Option<&[Poly]>) -> Result<Poly> {
    let mut acc = Poly::zero();
    for k in 0..=m {
        acc.add_assign_ref(&homogeneous_part(p, k, ctx, about)?);
    }
    Ok(acc)
}

/// The harmonic conjugate `v` of `u` on the plane with `v(0) = 0`.
pub fn harmonic_conjugate_2d(u: &Poly, ctx: &Context) -> Result<Poly> {
    if ctx.dim() != 2 {
        return Err(HftError::DimensionMismatch { expected: 2, found: ctx.dim() });
    }
    if !poly_laplacian(u, ctx).is_zero() {
        return Err(HftError::NotHarmonic);
    }
    let (x, y) = (ctx.coord(0), ctx.coord(1));
    let uy_on_axis = u.derivative(y).substitute(|v| (v == y).then(Poly::zero));
    let along_x = uy_on_axis.integrate_var(x).neg_ref();
    let along_y = u.derivative(x).integrate_var(y);
    Ok(along_x.add_ref(&along_y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;

    fn p(src: &str, ctx: &Context) -> Expr {
        parse_expression(src, ctx).unwrap()
    }

    #[test]
    fn laplacian_of_x3_norm() {
        let ctx = Context::new(3);
        let got = laplacian(&p("x3*norm(x)", &ctx), 1);
        assert!(got.equals(&p("4*x3/norm(x)", &ctx)));
    }

    #[test]
    fn laplacian_in_named_coordinates() {
        let ctx = Context::builder(3).coords(&["x", "y", "z"]).build();
        let got = laplacian(&p("x^2*y^3*z^4", &ctx), 1);
        assert!(got.equals(&p("12*x^2*y^3*z^2 + 6*x^2*y*z^4 + 2*y^3*z^4", &ctx)));
    }

    #[test]
    fn bilaplacian_of_inverse_norm_in_eight_dimensions() {
        let ctx = Context::new(8);
        let got = laplacian(&p("1/norm(x)", &ctx), 2);
        assert!(got.equals(&p("45/norm(x)^5", &ctx)));
    }

    #[test]
    fn mixed_partial_of_norm() {
        let ctx = Context::new(4);
        let e = partial_d(&p("norm(x)", &ctx), &[(1, 1), (0, 2), (3, 3)]);
        let want = p(
            "-15*(3*norm(x)^4*x2*x4 - 21*norm(x)^2*x1^2*x2*x4 - 7*norm(x)^2*x2*x4^3 + 63*x1^2*x2*x4^3)/norm(x)^11",
            &ctx,
        );
        assert!(e.equals(&want));
    }

    #[test]
    fn divergence_needs_n_fields() {
        let ctx = Context::new(3);
        assert_eq!(divergence(&[p("x1", &ctx)]).unwrap_err(), HftError::DimensionMismatch { expected: 3, found: 1 });
        let d = divergence(&[p("x1", &ctx), p("x2", &ctx), p("x3", &ctx)]).unwrap();
        assert!(d.equals(&Expr::int(&ctx, 3)));
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let ctx = Context::new(3);
        let e = p("x1^3*x2*norm(x)^-1 + x3^2", &ctx);
        assert!(divergence(&gradient(&e)).unwrap().equals(&laplacian(&e, 1)));
    }

    #[test]
    fn surface_normal_derivative() {
        let ctx = Context::new(3);
        let q = p("x1^2 + 3*x2^2 + 2*x3^2", &ctx).to_polynomial().unwrap();
        let q = q.map_coeffs(|c| c.as_rational().unwrap());
        let f = p("x1^4*x2^8*x3^5", &ctx);
        let got = normal_d_surface(&f, &q).unwrap();
        let want = p("38*x1^4*x2^8*x3^5/sqrt(x1^2 + 9*x2^2 + 4*x3^2)", &ctx);
        assert!(got.equals(&want));
    }

    #[test]
    fn sphere_normal_derivative_of_homogeneous() {
        let ctx = Context::new(3);
        let d = normal_d_sphere(&p("x1*x2", &ctx)).unwrap();
        assert!(d.equals(&p("2*x1*x2", &ctx)));
        assert!(normal_d_sphere(&Expr::int(&ctx, 5)).unwrap().is_zero());
    }

    #[test]
    fn homogeneous_part_about_point() {
        let ctx = Context::builder(3).extra_vars(&["b1", "b2", "b3"]).build();
        let f = p("x1*x2 + x3^4", &ctx).to_polynomial().unwrap();
        let b: Vec<Poly> = ["b1", "b2", "b3"].iter().map(|n| Poly::var(ctx.var(n).unwrap())).collect();
        let got = homogeneous_part(&f, 2, &ctx, Some(&b)).unwrap();
        let want = p("(x1 - b1)*(x2 - b2) + 6*b3^2*(x3 - b3)^2", &ctx).to_polynomial().unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn taylor_about_point() {
        let ctx = Context::builder(2).extra_vars(&["b1", "b2"]).build();
        let f = p("1 + x1*x2 + x1^2", &ctx).to_polynomial().unwrap();
        let b: Vec<Poly> = ["b1", "b2"].iter().map(|n| Poly::var(ctx.var(n).unwrap())).collect();
        let got = taylor_poly(&f, 2, &ctx, Some(&b)).unwrap();
        let want =
            p("1 + b1^2 + b1*b2 + (2*b1 + b2)*(x1 - b1) + (x1 - b1)^2 + b1*(x2 - b2) + (x1 - b1)*(x2 - b2)", &ctx)
                .to_polynomial()
                .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn conjugate_of_cubic() {
        let ctx = Context::builder(2).coords(&["x", "y"]).build();
        let u = p("15*x^2*y + 12*x^3*y - 5*y^3 - 12*x*y^3", &ctx).to_polynomial().unwrap();
        let v = harmonic_conjugate_2d(&u, &ctx).unwrap();
        let want = p("-5*x^3 - 3*x^4 + 15*x*y^2 + 18*x^2*y^2 - 3*y^4", &ctx).to_polynomial().unwrap();
        assert_eq!(v, want);
        let bad = p("x^2", &ctx).to_polynomial().unwrap();
        assert_eq!(harmonic_conjugate_2d(&bad, &ctx).unwrap_err(), HftError::NotHarmonic);
    }
}
