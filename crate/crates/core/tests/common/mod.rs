//! Property checks shared by the property suite and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hft_core::bvp;
use hft_core::calculus::{divergence, gradient, laplacian};
use hft_core::expr::Expr;
use hft_core::integrate;
use hft_core::parse::parse_expression;
use hft_core::render::expr_text;
use hft_core::{Context, Monomial, Poly, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative tolerance for derivative checks.
pub const FD_REL_TOL: f64 = 1e-6;
/// Step for central differences.
pub const FD_STEP: f64 = 1e-5;
/// Allowed Monte Carlo deviation in standard errors.
pub const MC_SIGMAS: f64 = 3.0;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `terms` are (exponents, numerator, denominator) over the coordinates.
pub fn poly_from(ctx: &Context, terms: &[(Vec<u32>, i64, i64)]) -> Poly {
    let mut p = Poly::zero();
    for (exps, a, b) in terms {
        let m = Monomial::from_exps(exps.iter().enumerate().take(ctx.dim()).map(|(i, e)| (ctx.coord(i), *e)));
        p.add_term(m, &Scalar::from_rational(q(*a, *b)));
    }
    p
}

pub fn random_poly(rng: &mut ChaCha8Rng, ctx: &Context, max_deg: u32, terms: usize) -> Poly {
    let t: Vec<(Vec<u32>, i64, i64)> = (0..terms)
        .map(|_| {
            let mut exps = vec![0; ctx.dim()];
            for _ in 0..rng.gen_range(0..=max_deg) {
                exps[rng.gen_range(0..ctx.dim())] += 1;
            }
            (exps, rng.gen_range(-9..=9), rng.gen_range(1..=5))
        })
        .collect();
    poly_from(ctx, &t)
}

/// `p0 + p1 ||x||^h + p2 ||x||^k log(||x||^2)^j`.
pub fn mixed_expr(ctx: &Context, p: [Poly; 3], h: i32, k: i32, j: u32) -> Expr {
    let [p0, p1, p2] = p;
    Expr::from_poly(ctx, p0)
        .add(&Expr::from_poly(ctx, p1).mul(&Expr::norm_pow(ctx, h)))
        .add(&Expr::from_poly(ctx, p2).mul(&Expr::norm_pow(ctx, k)).mul(&Expr::base_log(ctx, ctx.norm_base(), j)))
        .canonical()
}

pub fn canonical_idempotent(e: &Expr) -> Result<(), String> {
    let c = e.canonical();
    let cc = c.canonical();
    if expr_text(&c) != expr_text(&cc) || !c.sub(&cc).is_zero() {
        return Err(format!("canonical not idempotent on {}", expr_text(e)));
    }
    Ok(())
}

pub fn finite_differences(e: &Expr, point: &[f64]) -> Result<(), String> {
    let ctx = e.ctx();
    for v in ctx.coords() {
        let d = e.derivative(v).canonical().eval_f64(point);
        let mut plus = point.to_vec();
        let mut minus = point.to_vec();
        plus[v as usize] += FD_STEP;
        minus[v as usize] -= FD_STEP;
        let fd = (e.eval_f64(&plus) - e.eval_f64(&minus)) / (2.0 * FD_STEP);
        let within = (fd - d).abs() <= FD_REL_TOL * d.abs().max(1.0);
        if !within {
            return Err(format!("d/d{}: exact {d}, difference quotient {fd} for {}", ctx.var_name(v), expr_text(e)));
        }
    }
    Ok(())
}

pub fn laplacian_is_div_grad(e: &Expr) -> Result<(), String> {
    let dg = divergence(&gradient(e)).map_err(|err| err.to_string())?;
    if !dg.sub(&laplacian(e, 1)).is_zero() {
        return Err(format!("div grad differs from the Laplacian for {}", expr_text(e)));
    }
    Ok(())
}

/// The sphere average of a harmonic function about `c` with radius `r` is its value at `c`.
pub fn mean_value(p: &Poly, ctx: &Context, c: &[Rational], r: &Rational) -> Result<(), String> {
    let h = bvp::dirichlet_sphere(p, ctx);
    let shifted = h.substitute(|v| {
        ctx.is_coord(v).then(|| Poly::var(v).scale(r).add_ref(&Poly::from_rational(c[v as usize].clone())))
    });
    let avg = integrate::integrate_sphere(&shifted, ctx).map_err(|e| e.to_string())?;
    let point: BTreeMap<_, _> = ctx.coords().into_iter().map(|v| (v, c[v as usize].clone())).collect();
    let at_c = Expr::from_poly(ctx, h).eval_at(&point).map_err(|e| e.to_string())?;
    if avg != at_c {
        return Err(format!("sphere mean {avg} differs from centre value {at_c}"));
    }
    Ok(())
}

/// Compares the exact ellipsoid volume integral with a Monte Carlo estimate
/// over the bounding box.
pub fn monte_carlo_ellipsoid(
    p: &Poly,
    ctx: &Context,
    b: &[Rational],
    c: &[Rational],
    d: &Rational,
    samples: usize,
    seed: u64,
) -> Result<(), String> {
    let exact = integrate::integrate_ellipsoid_volume(p, b, c, d, ctx).map_err(|e| e.to_string())?.to_f64();
    let f = |x: &Rational| num_traits::ToPrimitive::to_f64(x).unwrap();
    let n = ctx.dim();
    let bf: Vec<f64> = b.iter().map(f).collect();
    let cf: Vec<f64> = c.iter().map(f).collect();
    let centre: Vec<f64> = (0..n).map(|i| -cf[i] / (2.0 * bf[i])).collect();
    let rho2: f64 = (0..n).map(|i| cf[i] * cf[i] / (4.0 * bf[i])).sum::<f64>() - f(d);
    let half: Vec<f64> = bf.iter().map(|bi| (rho2 / bi).sqrt()).collect();
    let box_vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum2) = (0.0, 0.0);
    let mut x = vec![0.0; ctx.var_count()];
    for _ in 0..samples {
        for i in 0..n {
            x[i] = centre[i] + half[i] * rng.gen_range(-1.0..1.0);
        }
        let qv: f64 = (0..n).map(|i| bf[i] * x[i] * x[i] + cf[i] * x[i]).sum::<f64>() + f(d);
        let val = if qv < 0.0 { p.eval_with(|v| x[v as usize], |s| s.to_f64()) } else { 0.0 };
        sum += val;
        sum2 += val * val;
    }
    let m = samples as f64;
    let mean = sum / m;
    let sigma = box_vol * ((sum2 / m - mean * mean).max(0.0) / m).sqrt();
    let estimate = box_vol * mean;
    if (estimate - exact).abs() > MC_SIGMAS * sigma + 1e-12 {
        return Err(format!("exact {exact}, Monte Carlo {estimate} +- {sigma}"));
    }
    Ok(())
}

pub fn render_round_trip(e: &Expr) -> Result<(), String> {
    let text = expr_text(e);
    let back = parse_expression(&text, e.ctx()).map_err(|err| format!("{text}: {err}"))?;
    if !back.sub(e).is_zero() {
        return Err(format!("round trip changed {text} into {}", expr_text(&back)));
    }
    Ok(())
}
