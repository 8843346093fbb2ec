//! Poisson and Bergman kernels for the unit ball and the upper half-space,
//! and the harmonic Bergman projection of polynomials.
//!
//! Half-space points are split as `(x, y)` with `x` in `R^(n-1)` and `y` the
//! last coordinate. Their components are rational polynomials, so variables
//! and numbers can be mixed freely.

use num_traits::One;

use crate::context::Context;
use crate::error::{HftError, Result};
use crate::expr::Expr;
use crate::harmonic::harmonic_decompose;
use crate::integrate::unit_sphere_area;
use crate::poly::{Monomial, Var};
use crate::scalar::Scalar;
use crate::{Poly, QPoly, Rational};

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn sum_sq(vs: &[Var]) -> QPoly {
    let mut p = QPoly::zero();
    for v in vs {
        p.add_term(Monomial::var_pow(*v, 2), &Rational::one());
    }
    p
}

fn dot(x: &[Var], y: &[Var]) -> QPoly {
    let mut p = QPoly::zero();
    for (a, b) in x.iter().zip(y) {
        p.add_term(Monomial::var(*a).mul(&Monomial::var(*b)), &Rational::one());
    }
    p
}

fn check_lengths(x: usize, y: usize) -> Result<()> {
    if x != y {
        return Err(HftError::DimensionMismatch { expected: x, found: y });
    }
    if x < 2 {
        return Err(HftError::UnsupportedDimension(x));
    }
    Ok(())
}

/// `1 - 2 x.y + ||x||^2 ||y||^2`, or `1 - 2 x.y + ||x||^2` on the unit sphere in `y`.
fn ball_base(x: &[Var], y: &[Var], y_unit: bool) -> (QPoly, QPoly) {
    let xx = sum_sq(x);
    let s = if y_unit { xx } else { xx.mul_ref(&sum_sq(y)) };
    let q = QPoly::one().sub_ref(&dot(x, y).scale(&rat(2))).add_ref(&s);
    (q, s)
}

/// `(u + y)^2 + ||x - t||^2` together with `u + y`.
fn half_space_base(x: &[QPoly], y: &QPoly, t: &[QPoly], u: &QPoly) -> Result<(QPoly, QPoly, QPoly)> {
    if x.len() != t.len() {
        return Err(HftError::DimensionMismatch { expected: x.len(), found: t.len() });
    }
    let w = u.add_ref(y);
    let mut d2 = QPoly::zero();
    for (a, b) in x.iter().zip(t) {
        let d = a.sub_ref(b);
        d2 = d2.add_ref(&d.mul_ref(&d));
    }
    let b = w.mul_ref(&w).add_ref(&d2);
    Ok((w, d2, b))
}

/// The extended Poisson kernel of the unit ball,
/// `(1 - ||x||^2 ||y||^2) (1 - 2 x.y + ||x||^2 ||y||^2)^(-n/2)`.
/// With `y_unit` the kernel is specialized to `||y|| = 1`.
pub fn poisson_kernel(ctx: &Context, x: &[Var], y: &[Var], y_unit: bool) -> Result<Expr> {
    check_lengths(x.len(), y.len())?;
    let n = x.len() as i32;
    let (q, s) = ball_base(x, y, y_unit);
    let num = QPoly::one().sub_ref(&s);
    Ok(Expr::base_pow(ctx, &q, -n)?.mul_poly(&num.to_coeff()).canonical())
}

/// The extended Poisson kernel of the upper half-space at `((x, y), (t, u))`,
/// `2 (u + y) / (n V(n)) ((u + y)^2 + ||x - t||^2)^(-n/2)`.
pub fn poisson_kernel_h(ctx: &Context, x: &[QPoly], y: &QPoly, t: &[QPoly], u: &QPoly) -> Result<Expr> {
    let n = x.len() + 1;
    let (w, _, b) = half_space_base(x, y, t, u)?;
    let c = Scalar::from_int(2).checked_div(&unit_sphere_area(n))?;
    Ok(Expr::base_pow(ctx, &b, -(n as i32))?.mul_poly(&w.to_coeff::<Scalar>().mul_coeff(&c)).canonical())
}

/// Reproducing kernel of the harmonic Bergman space of the unit ball,
/// `((n-4)||x||^4||y||^4 + (8 x.y - 2n - 4)||x||^2||y||^2 + n) / (n V(n) Q^(1 + n/2))`
/// with `Q = 1 - 2 x.y + ||x||^2 ||y||^2`.
pub fn bergman_kernel(ctx: &Context, x: &[Var], y: &[Var]) -> Result<Expr> {
    check_lengths(x.len(), y.len())?;
    let n = x.len() as i64;
    let (q, s) = ball_base(x, y, false);
    let mid = dot(x, y).scale(&rat(8)).sub_ref(&QPoly::constant(rat(2 * n + 4)));
    let num = s.mul_ref(&s).scale(&rat(n - 4)).add_ref(&mid.mul_ref(&s)).add_ref(&QPoly::constant(rat(n)));
    let c = Scalar::one().checked_div(&unit_sphere_area(n as usize))?;
    Ok(Expr::base_pow(ctx, &q, -(n as i32) - 2)?.mul_poly(&num.to_coeff::<Scalar>().mul_coeff(&c)).canonical())
}

/// Reproducing kernel of the harmonic Bergman space of the upper half-space,
/// `4 / (n V(n)) ((n-1)(u+y)^2 - ||x-t||^2) ((u+y)^2 + ||x-t||^2)^(-1-n/2)`.
pub fn bergman_kernel_h(ctx: &Context, x: &[QPoly], y: &QPoly, t: &[QPoly], u: &QPoly) -> Result<Expr> {
    let n = x.len() + 1;
    let (w, d2, b) = half_space_base(x, y, t, u)?;
    let num = w.mul_ref(&w).scale(&rat(n as i64 - 1)).sub_ref(&d2);
    let c = Scalar::from_int(4).checked_div(&unit_sphere_area(n))?;
    Ok(Expr::base_pow(ctx, &b, -(n as i32) - 2)?.mul_poly(&num.to_coeff::<Scalar>().mul_coeff(&c)).canonical())
}

/// Orthogonal projection of a polynomial onto the harmonic Bergman space of
/// the unit ball. Writing `p = sum ||x||^(2k) h` with `h` harmonic of degree
/// `m`, each piece projects to `(n + 2m) / (n + 2m + 2k) h`.
pub fn bergman_projection(p: &Poly, ctx: &Context) -> Result<Poly> {
    if p.vars().iter().any(|v| !ctx.is_coord(*v)) {
        return Err(HftError::NonPolynomialInput);
    }
    let n = ctx.dim() as i64;
    let mut out = Poly::zero();
    for (h, e) in harmonic_decompose(p, ctx).pairs {
        for (m, part) in h.homogeneous_parts_in(|v| ctx.is_coord(v)) {
            let m = m as i64;
            let f = Rational::new((n + 2 * m).into(), (n + 2 * m + e as i64).into());
            out.add_assign_ref(&part.scale(&f));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{laplacian, poly_laplacian};
    use crate::harmonic::{basis_harmonic, zonal_harmonic, BallIP, InnerProduct};
    use crate::integrate::unit_ball_volume;
    use crate::parse::parse_expression;
    use std::collections::BTreeMap;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    fn ex(src: &str, ctx: &Context) -> Expr {
        parse_expression(src, ctx).unwrap()
    }

    fn ball_ctx(n: usize) -> (Context, Vec<Var>, Vec<Var>) {
        let ctx = Context::builder(n).vector("y", n).build();
        let y = ctx.vector("y").unwrap().vars.clone();
        (ctx.clone(), ctx.coords(), y)
    }

    fn qvars(ctx: &Context, names: &[&str]) -> Vec<QPoly> {
        names.iter().map(|s| QPoly::var(ctx.var(s).unwrap())).collect()
    }

    #[test]
    fn poisson_general_form_at_n3() {
        let (ctx, x, y) = ball_ctx(3);
        let p = poisson_kernel(&ctx, &x, &y, false).unwrap();
        let want = ex("(1 - norm2(x)*norm2(y))*sqrt(1 - 2*dot(x,y) + norm2(x)*norm2(y))^(-3)", &ctx);
        assert!(p.equals(&want));
    }

    #[test]
    fn poisson_is_harmonic_in_x() {
        for n in [3, 5] {
            let (ctx, x, y) = ball_ctx(n);
            let p = poisson_kernel(&ctx, &x, &y, false).unwrap();
            assert!(laplacian(&p, 1).is_zero(), "n = {n}");
            let b = laplacian(&poisson_kernel(&ctx, &x, &y, true).unwrap(), 1);
            assert!(b.map_polys(|p| reduce_unit(p, &y)).canonical().is_zero(), "boundary, n = {n}");
        }
    }

    /// Normal form modulo `||y||^2 = 1`: the last component of `y` keeps degree at most one.
    fn reduce_unit(p: &Poly, y: &[Var]) -> Poly {
        let last = *y.last().unwrap();
        let mut rest = Poly::one();
        for v in &y[..y.len() - 1] {
            rest = rest.sub_ref(&Poly::var(*v).pow(2));
        }
        let mut out = Poly::zero();
        for (m, c) in p.terms() {
            let (e, others) = m.split_off(last);
            let t = Poly::monomial(others.mul(&Monomial::var_pow(last, e % 2)), c.clone());
            out.add_assign_ref(&t.mul_ref(&rest.pow(e / 2)));
        }
        out
    }

    #[test]
    fn poisson_at_origin_is_one() {
        let (ctx, x, y) = ball_ctx(4);
        let p = poisson_kernel(&ctx, &x, &y, true).unwrap();
        let mut point: BTreeMap<Var, Rational> = x.iter().map(|v| (*v, rat(0))).collect();
        for (v, c) in y.iter().zip([q(3, 5), q(4, 5), rat(0), rat(0)]) {
            point.insert(*v, c);
        }
        assert_eq!(p.eval_at(&point).unwrap(), Scalar::one());
    }

    #[test]
    fn poisson_half_space_whole_vector_form_at_n5() {
        let ctx = Context::builder(5).coord_vector("z").vector("w", 5).build();
        let z = qvars(&ctx, &["z1", "z2", "z3", "z4"]);
        let w = qvars(&ctx, &["w1", "w2", "w3", "w4"]);
        let k = poisson_kernel_h(&ctx, &z, &QPoly::var(ctx.var("z5").unwrap()), &w, &QPoly::zero()).unwrap();
        let want =
            ex("3*z5/(4*pi^2*sqrt(-2*(z1*w1 + z2*w2 + z3*w3 + z4*w4) + w1^2 + w2^2 + w3^2 + w4^2 + norm2(z))^5)", &ctx);
        assert!(k.equals(&want));
    }

    #[test]
    fn poisson_half_space_is_harmonic() {
        let ctx = Context::builder(4).vector("t", 3).extra_vars(&["u"]).build();
        let x: Vec<QPoly> = (0..3).map(QPoly::var).collect();
        let t = qvars(&ctx, &["t1", "t2", "t3"]);
        let u = QPoly::var(ctx.var("u").unwrap());
        let k = poisson_kernel_h(&ctx, &x, &QPoly::var(3), &t, &u).unwrap();
        assert!(laplacian(&k, 1).is_zero());
        let b = poisson_kernel_h(&ctx, &x, &QPoly::var(3), &t, &QPoly::zero()).unwrap();
        assert!(laplacian(&b, 1).is_zero());
    }

    #[test]
    fn bergman_at_n10() {
        let (ctx, x, y) = ball_ctx(10);
        let r = bergman_kernel(&ctx, &x, &y).unwrap();
        let want = ex(
            "12*(10 + 8*(-3 + dot(x,y))*norm2(x)*norm2(y) + 6*norm2(x)^2*norm2(y)^2)*(1 - 2*dot(x,y) + norm2(x)*norm2(y))^(-6)/pi^5",
            &ctx,
        );
        assert!(r.equals(&want));
    }

    #[test]
    fn bergman_at_origin() {
        let (ctx, x, y) = ball_ctx(3);
        let r = bergman_kernel(&ctx, &x, &y).unwrap();
        let point: BTreeMap<Var, Rational> = x.iter().chain(&y).map(|v| (*v, rat(0))).collect();
        let want = Scalar::one().checked_div(&unit_ball_volume(3)).unwrap();
        assert_eq!(r.eval_at(&point).unwrap(), want);
    }

    #[test]
    fn bergman_is_harmonic() {
        for n in [3, 5] {
            let (ctx, x, y) = ball_ctx(n);
            assert!(laplacian(&bergman_kernel(&ctx, &x, &y).unwrap(), 1).is_zero());
        }
    }

    /// The closed form agrees with the zonal series `sum (n+2m)/(n V(n)) Z_m`
    /// through bidegree 6, using `Q^(-a) = sum_k binom(a+k-1, k) s^k` with
    /// `s = 2 x.y - ||x||^2 ||y||^2`.
    #[test]
    fn bergman_matches_zonal_series() {
        const M: u32 = 6;
        for n in [3usize, 5] {
            let (_, x, y) = ball_ctx(n);
            let ni = n as i64;
            let (_, s2) = ball_base(&x, &y, false);
            let s = dot(&x, &y).scale(&rat(2)).sub_ref(&s2);
            let a = Rational::new((ni + 2).into(), 2.into());
            let is_x = |v: Var| x.contains(&v);
            let truncate = |p: QPoly| {
                let mut out = QPoly::zero();
                for (m, c) in p.into_terms() {
                    if m.degree_in(is_x) <= M {
                        out.add_term(m, &c);
                    }
                }
                out
            };
            let mut series = QPoly::zero();
            let mut coef = Rational::one();
            let mut sk = QPoly::one();
            for k in 0..=M as i64 {
                series = series.add_ref(&sk.scale(&coef));
                coef = coef * (&a + rat(k)) / rat(k + 1);
                sk = truncate(sk.mul_ref(&s));
            }
            let mid = dot(&x, &y).scale(&rat(8)).sub_ref(&QPoly::constant(rat(2 * ni + 4)));
            let num = s2.mul_ref(&s2).scale(&rat(ni - 4)).add_ref(&mid.mul_ref(&s2)).add_ref(&QPoly::constant(rat(ni)));
            let closed = truncate(num.mul_ref(&series));
            let mut head = Poly::zero();
            for (d, part) in closed.to_coeff::<Scalar>().homogeneous_parts_in(is_x) {
                if d <= M {
                    head.add_assign_ref(&part);
                }
            }
            let mut zonal = Poly::zero();
            for m in 0..=M {
                let z = zonal_harmonic(m, n).expand(&x, &y, false, false);
                zonal.add_assign_ref(&z.scale(&rat(ni + 2 * m as i64)));
            }
            assert_eq!(head, zonal, "n = {n}");
        }
    }

    #[test]
    fn bergman_half_space_at_n10() {
        let ctx = Context::builder(10).coord_vector("z").vector("w", 10).build();
        let z: Vec<QPoly> = (0..9).map(QPoly::var).collect();
        let w: Vec<QPoly> = ctx.vector("w").unwrap().vars[..9].iter().map(|v| QPoly::var(*v)).collect();
        let z10 = QPoly::var(9);
        let w10 = QPoly::var(ctx.var("w10").unwrap());
        let k = bergman_kernel_h(&ctx, &z, &z10, &w, &w10).unwrap();
        let want = ex(
            "48*(2*dot(w,z) - norm2(w) - norm2(z) + 16*w10*z10 + 10*(w10^2 + z10^2))*(2*dot(w,z) - norm2(w) - norm2(z) - 4*w10*z10)^(-6)/pi^5",
            &ctx,
        );
        assert!(k.equals(&want));
    }

    #[test]
    fn bergman_half_space_symmetry_and_harmonicity() {
        let ctx = Context::builder(3).vector("t", 2).extra_vars(&["u"]).build();
        let x: Vec<QPoly> = (0..2).map(QPoly::var).collect();
        let y = QPoly::var(2);
        let t = qvars(&ctx, &["t1", "t2"]);
        let u = QPoly::var(ctx.var("u").unwrap());
        let k = bergman_kernel_h(&ctx, &x, &y, &t, &u).unwrap();
        let swapped = bergman_kernel_h(&ctx, &t, &u, &x, &y).unwrap();
        assert!(k.equals(&swapped));
        assert!(laplacian(&k, 1).is_zero());
    }

    #[test]
    fn projection_reference_at_n5() {
        let ctx = Context::new(5);
        let p = ex("x1^5*x2^3", &ctx).to_polynomial().unwrap();
        let got = bergman_projection(&p, &ctx).unwrap();
        let want = ex(
            "3*x1*x2/143 - 3/221*norm(x)^6*x1*x2 + 2/17*norm(x)^4*x1^3*x2 - 3/17*norm(x)^2*x1^5*x2 + 1/17*norm(x)^4*x1*x2^3 - 10/17*norm(x)^2*x1^3*x2^3 + x1^5*x2^3 + 1/17*(-norm(x)^2*x1*x2 + 2*x1^3*x2 + x1*x2^3) + 1/2717*(135*norm(x)^4*x1*x2 - 660*norm(x)^2*x1^3*x2 + 429*x1^5*x2 - 330*norm(x)^2*x1*x2^3 + 1430*x1^3*x2^3)",
            &ctx,
        );
        assert!(Expr::from_poly(&ctx, got).equals(&want));
    }

    /// Oracle: expansion in a ball-orthonormal basis of each degree.
    fn projection_by_basis(p: &Poly, ctx: &Context) -> Poly {
        let deg = p.degree_in(|v| ctx.is_coord(v)).unwrap_or(0);
        let mut out = Poly::zero();
        for m in 0..=deg {
            for e in basis_harmonic(m, ctx, Some(&BallIP)).unwrap() {
                let c = BallIP.inner(p, &e, ctx).unwrap();
                out.add_assign_ref(&e.mul_coeff(&c));
            }
        }
        out
    }

    #[test]
    fn projection_matches_basis_expansion() {
        for (n, src) in [(3, "x1^2 + x2^2 + x3^2"), (3, "x1^3*x2 - 2*x3^2 + 5"), (4, "x1^2*x2^2*x3 + x4")] {
            let ctx = Context::new(n);
            let p = ex(src, &ctx).to_polynomial().unwrap();
            let got = bergman_projection(&p, &ctx).unwrap();
            assert_eq!(got, projection_by_basis(&p, &ctx), "{src}");
            assert!(poly_laplacian(&got, &ctx).is_zero());
        }
    }

    #[test]
    fn projection_fixes_harmonic() {
        let ctx = Context::new(3);
        let h = ex("x1*x2*x3 + x1^2 - x2^2", &ctx).to_polynomial().unwrap();
        assert_eq!(bergman_projection(&h, &ctx).unwrap(), h);
    }
}
