//! Randomized invariants for every module.

mod common;

use std::collections::BTreeMap;

use common::*;
use hft_core::bvp::{self, AntiLaplacianMode, Region};
use hft_core::calculus::{self, laplacian, normal_d_sphere, poly_laplacian};
use hft_core::expr::{restrict_expr_to_sphere, restrict_to_sphere, Expr};
use hft_core::harmonic::{self, BallIP, InnerProduct};
use hft_core::integrate::{self, unit_ball_volume, RadialFunction};
use hft_core::kernels::bergman_projection;
use hft_core::{Context, Poly, Rational, Scalar};
use num_traits::{One, Zero};
use proptest::prelude::*;

type RawPoly = Vec<(Vec<u32>, i64, i64)>;

fn raw_poly(n: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, n), -9i64..=9, 1i64..=5), 0..=max_terms)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(a, b)| q(a, b))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (rational(), 0u32..4, 0i32..3, 1i64..8).prop_map(|(c, kind, pk, r)| {
        let base = Scalar::from_rational(c);
        match kind {
            0 => base,
            1 => &base * &Scalar::sqrt_rational(&Rational::from_integer(r.into())).unwrap(),
            2 => &base * &Scalar::pi_half_pow(pk),
            _ => &base * &Scalar::log_rational(&Rational::from_integer((r + 1).into())).unwrap(),
        }
    })
}

/// Rational point on the unit sphere in R^3 from two rational parameters.
fn unit_point(a: &Rational, b: &Rational) -> Vec<Rational> {
    let s = a * a + b * b;
    let d = &s + Rational::one();
    vec![
        a * Rational::from_integer(2.into()) / &d,
        b * Rational::from_integer(2.into()) / &d,
        (s - Rational::one()) / d,
    ]
}

fn point_map(ctx: &Context, p: &[Rational]) -> BTreeMap<u16, Rational> {
    ctx.coords().into_iter().zip(p.iter().cloned()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    // scalar

    #[test]
    fn scalar_ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn scalar_sum_order_independent(xs in prop::collection::vec(scalar(), 1..6)) {
        let fwd = xs.iter().fold(Scalar::zero(), |acc, x| &acc + x);
        let rev = xs.iter().rev().fold(Scalar::zero(), |acc, x| &acc + x);
        prop_assert_eq!(fwd, rev);
    }

    #[test]
    fn scalar_sqrt_squares_back(a in scalar()) {
        let s = &a * &a;
        if let Ok(r) = s.sqrt() {
            prop_assert_eq!(&r * &r, s);
        }
    }

    #[test]
    fn approx_separates_distinct_values(a in scalar(), b in scalar()) {
        let digits = 12;
        let fa: f64 = a.approx(digits).parse().unwrap();
        let fb: f64 = b.approx(digits).parse().unwrap();
        if (fa - fb).abs() > 10f64.powi(-(digits as i32) + 2) {
            prop_assert_ne!(a, b);
        }
    }

    // expr

    #[test]
    fn commutator_is_zero(p in raw_poly(3, 3, 4), r in raw_poly(3, 3, 4), h in -5i32..5, k in -4i32..4) {
        let ctx = Context::new(3);
        let a = mixed_expr(&ctx, [poly_from(&ctx, &p), poly_from(&ctx, &r), Poly::zero()], h, 0, 0);
        let b = mixed_expr(&ctx, [poly_from(&ctx, &r), poly_from(&ctx, &p), poly_from(&ctx, &p)], k, h, 1);
        prop_assert!(a.mul(&b).sub(&b.mul(&a)).is_zero());
    }

    #[test]
    fn sphere_restriction_matches_evaluation(p in raw_poly(3, 3, 4), r in raw_poly(3, 3, 3), h in -5i32..5, a in rational(), b in rational()) {
        let ctx = Context::new(3);
        let e = mixed_expr(&ctx, [poly_from(&ctx, &p), poly_from(&ctx, &r), poly_from(&ctx, &r)], h, h - 1, 2);
        let restricted = Expr::from_poly(&ctx, restrict_expr_to_sphere(&e).unwrap());
        let pt = point_map(&ctx, &unit_point(&a, &b));
        prop_assert_eq!(restricted.eval_at(&pt).unwrap(), e.eval_at(&pt).unwrap());
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in raw_poly(3, 3, 3), r in raw_poly(3, 3, 3), h in -4i32..4, pt in prop::collection::vec(rational(), 3)) {
        prop_assume!(pt.iter().any(|c| !c.is_zero()));
        let ctx = Context::new(3);
        let a = mixed_expr(&ctx, [poly_from(&ctx, &p), poly_from(&ctx, &r), Poly::zero()], h, 0, 0);
        let b = mixed_expr(&ctx, [poly_from(&ctx, &r), Poly::zero(), poly_from(&ctx, &p)], 0, h, 1);
        let at = point_map(&ctx, &pt);
        let (va, vb) = (a.eval_at(&at).unwrap(), b.eval_at(&at).unwrap());
        prop_assert_eq!(a.add(&b).canonical().eval_at(&at).unwrap(), &va + &vb);
        prop_assert_eq!(a.mul(&b).canonical().eval_at(&at).unwrap(), &va * &vb);
    }

    #[test]
    fn canonical_form_is_idempotent(p in raw_poly(3, 3, 4), r in raw_poly(3, 3, 4), h in -5i32..5, j in 0u32..3) {
        let ctx = Context::new(3);
        let e = mixed_expr(&ctx, [poly_from(&ctx, &p), poly_from(&ctx, &r), poly_from(&ctx, &p)], h, h + 1, j);
        prop_assert_eq!(canonical_idempotent(&e), Ok(()));
    }

    #[test]
    fn render_then_parse_is_identity(p in raw_poly(3, 4, 5), r in raw_poly(3, 3, 4), h in -6i32..6, j in 0u32..3) {
        let ctx = Context::new(3);
        let e = mixed_expr(&ctx, [poly_from(&ctx, &p), poly_from(&ctx, &r), poly_from(&ctx, &r)], h, h, j);
        prop_assert_eq!(render_round_trip(&e), Ok(()));
    }

    // calculus

    #[test]
    fn mixed_partials_commute(p in raw_poly(3, 3, 4), h in -5i32..5) {
        let ctx = Context::new(3);
        let e = mixed_expr(&ctx, [Poly::zero(), poly_from(&ctx, &p), Poly::zero()], h, 0, 0);
        let a = calculus::partial_d(&e, &[(0, 1), (1, 2)]);
        let b = calculus::partial_d(&e, &[(1, 2), (0, 1)]);
        prop_assert!(a.sub(&b).is_zero());
    }

    #[test]
    fn laplacian_equals_div_grad(p in raw_poly(3, 3, 4), r in raw_poly(3, 2, 3), h in -5i32..5, j in 0u32..3) {
        let ctx = Context::new(3);
        let e = mixed_expr(&ctx, [poly_from(&ctx, &p), poly_from(&ctx, &r), poly_from(&ctx, &r)], h, h, j);
        prop_assert_eq!(laplacian_is_div_grad(&e), Ok(()));
    }

    #[test]
    fn derivatives_match_central_differences(p in raw_poly(3, 3, 4), r in raw_poly(3, 2, 3), h in -5i32..5, pt in prop::collection::vec(0.3f64..1.5, 3)) {
        let ctx = Context::new(3);
        let e = mixed_expr(&ctx, [poly_from(&ctx, &p), poly_from(&ctx, &r), poly_from(&ctx, &r)], h, h, 1);
        prop_assert_eq!(finite_differences(&e, &pt), Ok(()));
    }

    #[test]
    fn euler_identity(p in raw_poly(3, 4, 5), m in 0u32..6) {
        let ctx = Context::new(3);
        let hp = poly_from(&ctx, &p).homogeneous_part_in(m, |v| ctx.is_coord(v));
        let mut lhs = Poly::zero();
        for v in ctx.coords() {
            lhs.add_assign_ref(&hp.derivative(v).mul_ref(&Poly::var(v)));
        }
        prop_assert_eq!(lhs, hp.scale(&Rational::from_integer(m.into())));
    }

    #[test]
    fn taylor_is_sum_of_homogeneous_parts(p in raw_poly(2, 3, 4), b in prop::collection::vec(rational(), 2), m in 0u32..5) {
        let ctx = Context::new(2);
        let f = poly_from(&ctx, &p);
        let about: Vec<Poly> = b.iter().map(|c| Poly::from_rational(c.clone())).collect();
        let mut sum = Poly::zero();
        for k in 0..=m {
            sum.add_assign_ref(&calculus::homogeneous_part(&f, k, &ctx, Some(&about)).unwrap());
        }
        prop_assert_eq!(sum, calculus::taylor_poly(&f, m, &ctx, Some(&about)).unwrap());
    }

    // integrate

    #[test]
    fn ball_and_sphere_integrals_agree(p in raw_poly(3, 4, 4), m in 0u32..7) {
        let ctx = Context::new(3);
        let hp = poly_from(&ctx, &p).homogeneous_part_in(m, |v| ctx.is_coord(v));
        let ball = integrate::integrate_ball(&hp, &RadialFunction::one(), &ctx).unwrap();
        let sphere = integrate::integrate_sphere(&hp, &ctx).unwrap();
        let k = unit_ball_volume(3).scale(&q(3, 3 + m as i64));
        prop_assert_eq!(ball, &k * &sphere);
    }

    #[test]
    fn unit_ellipsoid_is_the_ball(p in raw_poly(3, 4, 4)) {
        let ctx = Context::new(3);
        let f = poly_from(&ctx, &p);
        let ones = vec![Rational::one(); 3];
        let zeros = vec![Rational::zero(); 3];
        let e = integrate::integrate_ellipsoid_volume(&f, &ones, &zeros, &-Rational::one(), &ctx).unwrap();
        prop_assert_eq!(e, integrate::integrate_ball(&f, &RadialFunction::one(), &ctx).unwrap());
    }

    #[test]
    fn odd_integrands_vanish_on_centred_ellipsoids(p in raw_poly(3, 3, 4), b in prop::collection::vec(1i64..6, 3)) {
        let ctx = Context::new(3);
        let f = poly_from(&ctx, &p).mul_ref(&Poly::var(1));
        let odd = f.sub_ref(&f.substitute(|v| (v == 1).then(|| Poly::var(1).neg_ref()))).scale(&q(1, 2));
        let bq: Vec<Rational> = b.iter().map(|x| q(*x, 1)).collect();
        let zeros = vec![Rational::zero(); 3];
        prop_assert!(integrate::integrate_ellipsoid_volume(&odd, &bq, &zeros, &-Rational::one(), &ctx).unwrap().is_zero());
        prop_assert!(integrate::integrate_ellipsoid_area(&odd, &bq, &zeros, &-Rational::one(), &ctx).unwrap().is_zero());
    }

    // harmonic

    #[test]
    fn decomposition_reconstructs(p in raw_poly(4, 3, 6), n in 2usize..=4) {
        let ctx = Context::new(n);
        let f = poly_from(&ctx, &p);
        let d = harmonic::harmonic_decompose(&f, &ctx);
        prop_assert!(d.to_expr(&ctx).sub(&Expr::from_poly(&ctx, f)).is_zero());
        prop_assert!(d.pairs.iter().all(|(h, _)| poly_laplacian(h, &ctx).is_zero()));
    }

    // bvp

    #[test]
    fn dirichlet_mean_value(p in raw_poly(3, 4, 5)) {
        let ctx = Context::new(3);
        let f = poly_from(&ctx, &p);
        let u = bvp::dirichlet_sphere(&f, &ctx);
        prop_assert_eq!(u.constant_term(), integrate::integrate_sphere(&f, &ctx).unwrap());
    }

    #[test]
    fn harmonic_mean_value_about_any_centre(p in raw_poly(3, 3, 4), c in prop::collection::vec(rational(), 3), r in (1i64..5, 1i64..4)) {
        let ctx = Context::new(3);
        prop_assert_eq!(mean_value(&poly_from(&ctx, &p), &ctx, &c, &q(r.0, r.1)), Ok(()));
    }

    #[test]
    fn solver_contracts(p in raw_poly(3, 3, 4), g in raw_poly(3, 2, 3)) {
        let ctx = Context::new(3);
        let f = poly_from(&ctx, &p);
        let rhs = poly_from(&ctx, &g);
        let on_sphere = |a: &Poly, b: &Poly| restrict_to_sphere(&ctx, &a.sub_ref(b), &Rational::one()).is_zero();

        let u = bvp::dirichlet(&f, &Region::Sphere, Some(&rhs), &ctx).unwrap();
        prop_assert!(laplacian(&u, 1).sub(&Expr::from_poly(&ctx, rhs.clone())).is_zero());
        prop_assert!(on_sphere(&u.to_polynomial().unwrap(), &f));

        let ext = bvp::dirichlet(&f, &Region::ExteriorSphere, None, &ctx).unwrap();
        prop_assert!(laplacian(&ext, 1).is_zero());
        prop_assert!(on_sphere(&ext.substitute_norm_radius(&Scalar::one()).unwrap().to_polynomial().unwrap(), &f));

        let mean = integrate::integrate_sphere(&f, &ctx).unwrap();
        let centred = f.sub_ref(&Poly::constant(mean));
        let n = bvp::neumann_sphere(&centred, None, &ctx).unwrap();
        prop_assert!(laplacian(&n, 1).is_zero());
        prop_assert!(on_sphere(&normal_d_sphere(&n).unwrap().to_polynomial().unwrap(), &centred));
        prop_assert!(n.to_polynomial().unwrap().constant_term().is_zero());

        let b = bvp::bi_dirichlet(&f, &ctx);
        prop_assert!(laplacian(&b, 2).is_zero());
        prop_assert!(normal_d_sphere(&b).unwrap().is_zero());
        prop_assert!(on_sphere(&b.to_polynomial().unwrap(), &f));

        let before = bvp::radial_solve_count();
        let a = bvp::anti_laplacian(&Expr::from_poly(&ctx, f.clone()), &AntiLaplacianMode::Plain { singularity_at_zero: false }, &ctx).unwrap();
        prop_assert_eq!(bvp::radial_solve_count(), before);
        prop_assert!(laplacian(&a, 1).sub(&Expr::from_poly(&ctx, f)).is_zero());
    }

    // kernels

    #[test]
    fn projection_idempotent_and_orthogonal(p in raw_poly(5, 2, 4), n in prop::sample::select(vec![3usize, 5])) {
        let ctx = Context::new(n);
        let f = poly_from(&ctx, &p);
        let pf = bergman_projection(&f, &ctx).unwrap();
        prop_assert_eq!(bergman_projection(&pf, &ctx).unwrap(), pf.clone());
        let residual = f.sub_ref(&pf);
        let deg = f.degree_in(|v| ctx.is_coord(v)).unwrap_or(0).min(3);
        for m in 0..=deg {
            for e in harmonic::basis_harmonic(m, &ctx, Some(&BallIP)).unwrap() {
                prop_assert!(BallIP.inner(&residual, &e, &ctx).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn basis_sizes_match_dimension_formula() {
    for n in 2..=6usize {
        for m in 0..=8u32 {
            let ctx = Context::new(n);
            let got = harmonic::basis_harmonic_plain(m, &ctx).len();
            assert_eq!(got.to_string(), harmonic::dim_harmonic(m as u64, n as u64).to_string(), "m={m} n={n}");
        }
    }
}

#[test]
fn zonal_normalization() {
    for n in [3usize, 4, 6] {
        let ctx = Context::new(n);
        let x = ctx.coords();
        for m in 0..=6 {
            let z = harmonic::zonal_harmonic(m, n).expand(&x, &x, false, false);
            let r = restrict_to_sphere(&ctx, &z, &Rational::one());
            assert_eq!(r, Poly::from_rational(Rational::from_integer(harmonic::dim_harmonic(m as u64, n as u64))));
        }
    }
}

#[test]
fn volume_mean_value_on_harmonic_basis() {
    let ctx = Context::new(3);
    for m in 0..=4 {
        for h in harmonic::basis_harmonic_plain(m, &ctx).into_iter().chain([Poly::from_int(7)]) {
            let avg = integrate::integrate_ball(&h, &RadialFunction::one(), &ctx)
                .unwrap()
                .checked_div(&unit_ball_volume(3))
                .unwrap();
            assert_eq!(avg, h.constant_term());
        }
    }
}

#[test]
fn monte_carlo_ellipsoids() {
    let ctx = Context::new(3);
    let qs = |v: &[i64]| v.iter().map(|x| q(*x, 1)).collect::<Vec<_>>();
    let cases = [
        ("x1^2*x2", qs(&[1, 4, 3]), qs(&[0, 0, 0]), q(-1, 1)),
        ("1 + x3^2", qs(&[2, 2, 5]), qs(&[1, 0, -1]), q(-2, 1)),
        ("x1*x2*x3 + 3", qs(&[5, 3, 2]), qs(&[1, 4, 6]), q(-7, 1)),
        ("x2^4", qs(&[1, 1, 1]), qs(&[0, 2, 0]), q(0, 1)),
        ("x1^2 - x3", qs(&[3, 1, 2]), qs(&[0, 0, 0]), q(-5, 1)),
    ];
    for (seed, (src, b, c, d)) in cases.iter().enumerate() {
        let p = hft_core::parse::parse_expression(src, &ctx).unwrap().to_polynomial().unwrap();
        monte_carlo_ellipsoid(&p, &ctx, b, c, d, 200_000, seed as u64).unwrap();
    }
}
