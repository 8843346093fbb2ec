//! Boundary-value problems: Dirichlet, anti-Laplacians, Neumann, exterior
//! Neumann and biharmonic Dirichlet.

use std::cell::Cell;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::arith::factorial;
use crate::calculus::poly_laplacian;
use crate::context::Context;
use crate::error::{HftError, Result};
use crate::expr::Expr;
use crate::harmonic::{harmonic_decompose, monomials_of_degree, sphere_harmonic_parts};
use crate::integrate::{integrate_ellipsoid_area_poly, integrate_ellipsoid_volume_poly, integrate_sphere_poly};
use crate::linalg::{solve, Row};
use crate::poly::{Monomial, Var};
use crate::scalar::Scalar;
use crate::{Poly, QPoly, Rational};

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `b . x^2 + c . x + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadric {
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    pub d: Rational,
}

impl Quadric {
    /// Defaults: `c = 0`, `d = -1`.
    pub fn new(b: Vec<Rational>, c: Option<Vec<Rational>>, d: Option<Rational>) -> Self {
        let n = b.len();
        Quadric { b, c: c.unwrap_or_else(|| vec![Rational::zero(); n]), d: d.unwrap_or_else(|| rat(-1)) }
    }

    fn check(&self, ctx: &Context) -> Result<()> {
        let n = ctx.dim();
        if self.b.len() != n {
            return Err(HftError::DimensionMismatch { expected: n, found: self.b.len() });
        }
        if self.c.len() != n {
            return Err(HftError::DimensionMismatch { expected: n, found: self.c.len() });
        }
        Ok(())
    }

    pub fn to_qpoly(&self, ctx: &Context) -> QPoly {
        let mut q = QPoly::from_rational(self.d.clone());
        for (i, v) in ctx.coords().into_iter().enumerate() {
            q.add_term(Monomial::var_pow(v, 2), &self.b[i]);
            q.add_term(Monomial::var(v), &self.c[i]);
        }
        q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Sphere,
    ExteriorSphere,
    Annulus(Rational, Rational),
    Quadratic(Quadric),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AntiLaplacianMode {
    Plain { singularity_at_zero: bool },
    NormSquaredMultiple,
    QuadraticMultiple(Quadric),
}

thread_local! {
    static RADIAL_SOLVES: Cell<u64> = const { Cell::new(0) };
}

/// Number of radial ODE solves performed on this thread.
pub fn radial_solve_count() -> u64 {
    RADIAL_SOLVES.with(|c| c.get())
}

fn coords_only(p: &Poly, ctx: &Context) -> Result<()> {
    if p.vars().iter().any(|v| !ctx.is_coord(*v)) {
        return Err(HftError::InvalidArgument("polynomial depends on non-coordinate variables".into()));
    }
    Ok(())
}

fn norm_pow_times(ctx: &Context, p: Poly, h: i32) -> Expr {
    Expr::from_poly(ctx, p).mul(&Expr::norm_pow(ctx, h))
}

fn constant_term_in_coords(p: &Poly, ctx: &Context) -> Poly {
    p.homogeneous_part_in(0, |v| ctx.is_coord(v))
}

// ---------------------------------------------------------------------------
// Linear systems in polynomial unknowns

/// Accumulates equations "coefficient of monomial in block = rhs".
struct System {
    eqs: BTreeMap<(u8, Monomial), usize>,
    rows: Vec<Row>,
    rhs: Vec<Scalar>,
    ncols: usize,
}

impl System {
    fn new(ncols: usize) -> Self {
        System { eqs: BTreeMap::new(), rows: Vec::new(), rhs: Vec::new(), ncols }
    }

    fn row(&mut self, block: u8, m: &Monomial) -> usize {
        if let Some(i) = self.eqs.get(&(block, m.clone())) {
            return *i;
        }
        let i = self.rows.len();
        self.eqs.insert((block, m.clone()), i);
        self.rows.push(Row::new());
        self.rhs.push(Scalar::zero());
        i
    }

    fn add_column(&mut self, block: u8, col: usize, image: &QPoly) {
        for (m, c) in image.terms() {
            let i = self.row(block, m);
            let e = self.rows[i].entry(col).or_insert_with(Rational::zero);
            *e += c;
        }
    }

    fn add_rhs(&mut self, block: u8, p: &Poly) {
        for (m, c) in p.terms() {
            let i = self.row(block, m);
            self.rhs[i] = &self.rhs[i] + c;
        }
    }

    fn solve(self) -> Option<(Vec<Scalar>, bool)> {
        solve(self.rows, self.rhs, self.ncols).ok().map(|s| {
            let unique = s.is_unique();
            (s.values, unique)
        })
    }
}

fn monomials_up_to(ctx: &Context, lo: u32, hi: u32) -> Vec<Monomial> {
    let coords = ctx.coords();
    (lo..=hi).flat_map(|d| monomials_of_degree(&coords, d)).collect()
}

fn assemble(monos: &[Monomial], values: &[Scalar]) -> Poly {
    let mut p = Poly::zero();
    for (m, c) in monos.iter().zip(values) {
        p.add_term(m.clone(), c);
    }
    p
}

fn qpoly_laplacian(p: &QPoly, ctx: &Context) -> QPoly {
    let mut acc = QPoly::zero();
    for v in ctx.coords() {
        acc.add_assign_ref(&p.derivative(v).derivative(v));
    }
    acc
}

// ---------------------------------------------------------------------------
// Dirichlet

/// Harmonic function equal to `p` on the boundary of `region`, with
/// optional prescribed Laplacian `rhs`.
pub fn dirichlet(p: &Poly, region: &Region, rhs: Option<&Poly>, ctx: &Context) -> Result<Expr> {
    dirichlet_pair(p, p, region, rhs, ctx)
}

/// As [`dirichlet`], with separate data on the inner and outer spheres of an annulus.
pub fn dirichlet_pair(inner: &Poly, outer: &Poly, region: &Region, rhs: Option<&Poly>, ctx: &Context) -> Result<Expr> {
    let Some(g) = rhs else { return dirichlet_harmonic(inner, outer, region, ctx) };
    let v = anti_laplacian_poly(g, ctx);
    let w = dirichlet_harmonic(&inner.sub_ref(&v), &outer.sub_ref(&v), region, ctx)?;
    Ok(w.add(&Expr::from_poly(ctx, v)).canonical())
}

fn dirichlet_harmonic(inner: &Poly, outer: &Poly, region: &Region, ctx: &Context) -> Result<Expr> {
    match region {
        Region::Sphere => Ok(Expr::from_poly(ctx, dirichlet_sphere(inner, ctx))),
        Region::ExteriorSphere => Ok(dirichlet_exterior(inner, ctx)),
        Region::Annulus(r, s) => dirichlet_annulus(inner, outer, r, s, ctx),
        Region::Quadratic(q) => Ok(Expr::from_poly(ctx, dirichlet_quadratic(inner, q, ctx)?)),
    }
}

/// Poisson integral of a polynomial.
pub fn dirichlet_sphere(p: &Poly, ctx: &Context) -> Poly {
    let mut out = Poly::zero();
    for (h, _) in harmonic_decompose(p, ctx).pairs {
        out.add_assign_ref(&h);
    }
    out
}

fn exterior_exponent(n: usize, m: u32) -> i32 {
    2 - n as i32 - 2 * m as i32
}

fn dirichlet_exterior(p: &Poly, ctx: &Context) -> Expr {
    let n = ctx.dim();
    let mut out = Expr::zero(ctx);
    for (m, g) in sphere_harmonic_parts(p, ctx) {
        out = out.add(&norm_pow_times(ctx, g, exterior_exponent(n, m)));
    }
    out.canonical()
}

/// Homogeneous harmonic parts of `p` on the sphere of radius `r`, as polynomials
/// in `x` that agree with `p` there.
fn harmonic_parts_at_radius(p: &Poly, r: &Rational, ctx: &Context) -> BTreeMap<u32, Poly> {
    let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
    for (h, e) in harmonic_decompose(p, ctx).pairs {
        let k = num_traits::pow(r.clone(), e as usize);
        for (d, part) in h.homogeneous_parts_in(|v| ctx.is_coord(v)) {
            out.entry(d).or_default().add_assign_ref(&part.scale(&k));
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

fn rational_powi(r: &Rational, k: i32) -> Rational {
    if k >= 0 {
        num_traits::pow(r.clone(), k as usize)
    } else {
        num_traits::pow(r.recip(), (-k) as usize)
    }
}

fn dirichlet_annulus(inner: &Poly, outer: &Poly, r: &Rational, s: &Rational, ctx: &Context) -> Result<Expr> {
    let n = ctx.dim();
    if n < 3 {
        return Err(HftError::UnsupportedDimension(n));
    }
    if !r.is_positive() || r >= s {
        return Err(HftError::InvalidArgument("annulus radii must satisfy 0 < r < s".into()));
    }
    let gi = harmonic_parts_at_radius(inner, r, ctx);
    let go = harmonic_parts_at_radius(outer, s, ctx);
    let degrees: std::collections::BTreeSet<u32> = gi.keys().chain(go.keys()).copied().collect();
    let mut out = Expr::zero(ctx);
    for m in degrees {
        let a_r = gi.get(&m).cloned().unwrap_or_default();
        let a_s = go.get(&m).cloned().unwrap_or_default();
        // u = A(x) + B(x) ||x||^k with A, B homogeneous of degree m
        let k = exterior_exponent(n, m);
        let rk = rational_powi(r, k);
        let sk = rational_powi(s, k);
        let b = a_r.sub_ref(&a_s).scale(&(&rk - &sk).recip());
        let a = a_r.sub_ref(&b.scale(&rk));
        out = out.add(&Expr::from_poly(ctx, a)).add(&norm_pow_times(ctx, b, k));
    }
    Ok(out.canonical())
}

/// Harmonic polynomial `p + q f` for the quadric `q`.
pub fn dirichlet_quadratic(p: &Poly, quad: &Quadric, ctx: &Context) -> Result<Poly> {
    quad.check(ctx)?;
    coords_only(p, ctx)?;
    let q = quad.to_qpoly(ctx);
    let lap_p = poly_laplacian(p, ctx);
    if lap_p.is_zero() {
        return Ok(p.clone());
    }
    let dp = p.degree_in(|v| ctx.is_coord(v)).unwrap_or(0);
    let lo = dp.saturating_sub(2);
    for deg in lo..=dp + 2 {
        let monos = monomials_up_to(ctx, 0, deg);
        let mut sys = System::new(monos.len());
        for (j, m) in monos.iter().enumerate() {
            let img = qpoly_laplacian(&q.mul_monomial(m, &Rational::one()), ctx);
            sys.add_column(0, j, &img);
        }
        sys.add_rhs(0, &lap_p.neg_ref());
        if let Some((vals, _)) = sys.solve() {
            let f = assemble(&monos, &vals);
            return Ok(p.add_ref(&q.to_coeff::<Scalar>().mul_ref(&f)));
        }
    }
    Err(HftError::InfeasibleQuadratic)
}

// ---------------------------------------------------------------------------
// Anti-Laplacians

/// Polynomial anti-Laplacian, integrating monomial by monomial in the last
/// variable that occurs.
pub fn anti_laplacian_poly(f: &Poly, ctx: &Context) -> Poly {
    let n = ctx.dim() as i64;
    let coords = ctx.coords();
    let mut out = Poly::zero();
    for (m, c) in f.terms() {
        let Some(&v) = coords.iter().rev().find(|v| m.exp(**v) > 0) else {
            // constant in the coordinates: c ||x||^2 / (2n)
            for &u in &coords {
                out.add_term(m.mul(&Monomial::var_pow(u, 2)), &c.scale(&Rational::new(1.into(), (2 * n).into())));
            }
            continue;
        };
        let (a, rest) = m.split_off(v);
        let mut g = Poly::monomial(rest, c.clone());
        let a_fact = factorial(a as u64);
        let mut k = 0u32;
        while !g.is_zero() {
            let e = a + 2 * k + 2;
            let sign = if k.is_multiple_of(2) { 1 } else { -1 };
            let w = Rational::new(a_fact.clone() * sign, factorial(e as u64));
            out.add_assign_ref(&g.mul_monomial(&Monomial::var_pow(v, e), &Scalar::from_rational(w)));
            g = partial_laplacian(&g, &coords, v);
            k += 1;
        }
    }
    out
}

fn partial_laplacian(p: &Poly, coords: &[Var], skip: Var) -> Poly {
    let mut acc = Poly::zero();
    for &u in coords {
        if u != skip {
            acc.add_assign_ref(&p.derivative(u).derivative(u));
        }
    }
    acc
}

/// Radial function `sum c r^e log(r)^k`.
type Radial = BTreeMap<(i64, u32), Rational>;

fn radial_add(acc: &mut Radial, key: (i64, u32), c: Rational) {
    let e = acc.entry(key).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&key);
    }
}

/// Antiderivative in `r` with zero constant term.
fn radial_antiderivative(f: &Radial) -> Radial {
    let mut out = Radial::new();
    for (&(e, k), c) in f {
        if e == -1 {
            radial_add(&mut out, (0, k + 1), c / rat(k as i64 + 1));
            continue;
        }
        // int r^e L^k = r^(e+1) sum_i (-1)^i k!/(k-i)! L^(k-i) / (e+1)^(i+1)
        let ep1 = rat(e + 1);
        let mut coef = c / &ep1;
        for i in 0..=k {
            radial_add(&mut out, (e + 1, k - i), coef.clone());
            coef = -coef * rat((k - i) as i64) / &ep1;
        }
    }
    out
}

fn radial_shift(f: &Radial, by: i64) -> Radial {
    f.iter().map(|(&(e, k), c)| ((e + by, k), c.clone())).collect()
}

/// Solves `phi'' + (c/r) phi' = f` with zero-constant antiderivatives.
fn radial_solve(f: &Radial, c: i64) -> Radial {
    RADIAL_SOLVES.with(|k| k.set(k.get() + 1));
    let inner = radial_antiderivative(&radial_shift(f, c));
    radial_antiderivative(&radial_shift(&inner, -c))
}

fn radial_to_expr(ctx: &Context, f: &Radial) -> Expr {
    let nb = ctx.norm_base();
    let mut out = Expr::zero(ctx);
    for (&(e, k), c) in f {
        // log r = log(||x||^2) / 2
        let coef = c / num_traits::pow(rat(2), k as usize);
        let mut t = Expr::norm_pow(ctx, e as i32).scale(&coef);
        if k > 0 {
            t = t.mul(&Expr::base_log(ctx, nb, k));
        }
        out = out.add(&t);
    }
    out
}

/// Anti-Laplacian of `poly * ||x||^h * log(||x||^2)^k`.
fn anti_laplacian_radial_term(p: &Poly, h: i32, k: u32, ctx: &Context) -> Expr {
    let n = ctx.dim() as i64;
    let mut out = Expr::zero(ctx);
    for (hp, e2) in harmonic_decompose(p, ctx).pairs {
        for (m, part) in hp.homogeneous_parts_in(|v| ctx.is_coord(v)) {
            let mut f = Radial::new();
            // log(||x||^2)^k = 2^k log(r)^k
            f.insert((h as i64 + e2 as i64, k), num_traits::pow(rat(2), k as usize));
            let phi = radial_solve(&f, 2 * m as i64 + n - 1);
            out = out.add(&Expr::from_poly(ctx, part).mul(&radial_to_expr(ctx, &phi)));
        }
    }
    out
}

/// A function whose Laplacian is `f`.
pub fn anti_laplacian(f: &Expr, mode: &AntiLaplacianMode, ctx: &Context) -> Result<Expr> {
    match mode {
        AntiLaplacianMode::Plain { .. } => {
            let nb = ctx.norm_base();
            let mut out = Expr::zero(ctx);
            for (factors, p) in f.canonical().terms() {
                if factors.is_empty() {
                    out = out.add(&Expr::from_poly(ctx, anti_laplacian_poly(p, ctx)));
                    continue;
                }
                let [bf] = factors.as_slice() else {
                    return Err(HftError::UnsupportedRadialClass("more than one base factor".into()));
                };
                if bf.base != nb {
                    return Err(HftError::UnsupportedRadialClass(ctx.base_label(bf.base)));
                }
                out = out.add(&anti_laplacian_radial_term(p, bf.half_exp, bf.log_pow, ctx));
            }
            Ok(out.canonical())
        }
        AntiLaplacianMode::NormSquaredMultiple => {
            let p = f.to_polynomial().map_err(|_| HftError::NonPolynomialInput)?;
            let v = norm_squared_cofactor(&p, ctx);
            Ok(Expr::from_poly(ctx, v).mul(&Expr::norm_pow(ctx, 2)).canonical())
        }
        AntiLaplacianMode::QuadraticMultiple(quad) => {
            let p = f.to_polynomial().map_err(|_| HftError::NonPolynomialInput)?;
            let v = quadratic_cofactor(&p, quad, ctx)?;
            Ok(Expr::from_poly(ctx, quad.to_qpoly(ctx).to_coeff::<Scalar>().mul_ref(&v)))
        }
    }
}

/// `v` with `Laplacian(||x||^2 v) = f`, degree by degree.
pub fn norm_squared_cofactor(f: &Poly, ctx: &Context) -> Poly {
    let n = ctx.dim() as i64;
    let mut s = Poly::zero();
    for v in ctx.coords() {
        s.add_term(Monomial::var_pow(v, 2), &Scalar::one());
    }
    let mut out = Poly::zero();
    for (d, part) in f.homogeneous_parts_in(|v| ctx.is_coord(v)) {
        let d = d as i64;
        // v = sum_j g_j ||x||^(2j) Laplacian^j f_d
        let mut g = Rational::new(1.into(), (2 * (n + 2 * d)).into());
        let mut lap = part.clone();
        let mut spow = Poly::one();
        let mut j = 0i64;
        while !lap.is_zero() {
            out.add_assign_ref(&spow.mul_ref(&lap).scale(&g));
            j += 1;
            g = -g / rat(2 * (j + 1) * (n + 2 * d - 2 * j));
            lap = poly_laplacian(&lap, ctx);
            spow = spow.mul_ref(&s);
        }
    }
    out
}

/// `v` of degree `deg f` with `Laplacian(q v) = f`.
pub fn quadratic_cofactor(f: &Poly, quad: &Quadric, ctx: &Context) -> Result<Poly> {
    quad.check(ctx)?;
    coords_only(f, ctx)?;
    let q = quad.to_qpoly(ctx);
    let deg = f.degree_in(|v| ctx.is_coord(v)).unwrap_or(0);
    let monos = monomials_up_to(ctx, 0, deg);
    let mut sys = System::new(monos.len());
    for (j, m) in monos.iter().enumerate() {
        sys.add_column(0, j, &qpoly_laplacian(&q.mul_monomial(m, &Rational::one()), ctx));
    }
    sys.add_rhs(0, f);
    match sys.solve() {
        Some((vals, true)) => Ok(assemble(&monos, &vals)),
        _ => Err(HftError::SingularLinearSystem),
    }
}

// ---------------------------------------------------------------------------
// Neumann

fn unit_sphere_mean(p: &Poly, ctx: &Context) -> Poly {
    integrate_sphere_poly(p, ctx)
}

fn normal_data_sphere(v: &Poly, ctx: &Context) -> Poly {
    let mut acc = Poly::zero();
    for u in ctx.coords() {
        acc.add_assign_ref(&v.derivative(u).mul_ref(&Poly::var(u)));
    }
    acc
}

/// Harmonic `u` with normal derivative `f` on the unit sphere and `u(0) = 0`;
/// with `g`, `Laplacian u = g` instead of harmonic.
pub fn neumann_sphere(f: &Poly, g: Option<&Poly>, ctx: &Context) -> Result<Expr> {
    let (data, v) = match g {
        None => (f.clone(), None),
        Some(g) => {
            let v = anti_laplacian_poly(g, ctx);
            (f.sub_ref(&normal_data_sphere(&v, ctx)), Some(v))
        }
    };
    if !unit_sphere_mean(&data, ctx).is_zero() {
        return Err(HftError::SolvabilityViolation(match g {
            None => "the integral of f over the unit sphere must equal 0".into(),
            Some(_) => "the integral of f over the unit sphere must equal the integral of g over the unit ball".into(),
        }));
    }
    let mut w = Poly::zero();
    for (m, part) in sphere_harmonic_parts(&data, ctx) {
        if m == 0 {
            continue;
        }
        w.add_assign_ref(&part.scale(&Rational::new(1.into(), m.into())));
    }
    if let Some(v) = v {
        let c0 = constant_term_in_coords(&v, ctx);
        w = w.add_ref(&v).sub_ref(&c0);
    }
    Ok(Expr::from_poly(ctx, w))
}

/// Harmonic polynomial `h` with `grad h . grad q = f` on `{q = 0}` and `h(0) = 0`;
/// with `g`, `Laplacian h = g` instead.
pub fn neumann_quadratic(f: &Poly, g: Option<&Poly>, quad: &Quadric, ctx: &Context) -> Result<Poly> {
    quad.check(ctx)?;
    coords_only(f, ctx)?;
    let area = integrate_ellipsoid_area_poly(f, &quad.b, &quad.c, &quad.d, ctx)?;
    let vol = match g {
        Some(g) => integrate_ellipsoid_volume_poly(g, &quad.b, &quad.c, &quad.d, ctx)?,
        None => Poly::zero(),
    };
    if area != vol {
        return Err(HftError::SolvabilityViolation(match g {
            None => "the integral of f/||grad q|| over the ellipsoid must equal 0".into(),
            Some(_) => "the integral of f/||grad q|| over the ellipsoid must equal the integral of g inside it".into(),
        }));
    }
    let q = quad.to_qpoly(ctx);
    let (data, v) = match g {
        None => (f.clone(), None),
        Some(g) => {
            let v = anti_laplacian_poly(g, ctx);
            let mut grad_dot = Poly::zero();
            for u in ctx.coords() {
                grad_dot.add_assign_ref(&v.derivative(u).mul_ref(&q.derivative(u).to_coeff()));
            }
            (f.sub_ref(&grad_dot), Some(v))
        }
    };
    let w = neumann_quadratic_harmonic(&data, &q, ctx)?;
    Ok(match v {
        Some(v) => {
            let c0 = constant_term_in_coords(&v, ctx);
            w.add_ref(&v).sub_ref(&c0)
        }
        None => w,
    })
}

fn neumann_quadratic_harmonic(f: &Poly, q: &QPoly, ctx: &Context) -> Result<Poly> {
    if f.is_zero() {
        return Ok(Poly::zero());
    }
    let df = f.degree_in(|v| ctx.is_coord(v)).unwrap_or(0);
    let grads: Vec<(Var, QPoly)> = ctx.coords().into_iter().map(|u| (u, q.derivative(u))).collect();
    for deg in df.max(1)..=df + 2 {
        let h_monos = monomials_up_to(ctx, 1, deg);
        let r_deg = deg.max(df).saturating_sub(1);
        let r_monos = monomials_up_to(ctx, 0, r_deg);
        let nh = h_monos.len();
        let mut sys = System::new(nh + r_monos.len());
        for (j, m) in h_monos.iter().enumerate() {
            let mp = QPoly::monomial(m.clone(), Rational::one());
            sys.add_column(0, j, &qpoly_laplacian(&mp, ctx));
            let mut img = QPoly::zero();
            for (u, dq) in &grads {
                img.add_assign_ref(&mp.derivative(*u).mul_ref(dq));
            }
            sys.add_column(1, j, &img);
        }
        for (j, m) in r_monos.iter().enumerate() {
            sys.add_column(1, nh + j, &q.mul_monomial(m, &Rational::one()).neg_ref());
        }
        sys.add_rhs(1, f);
        if let Some((vals, _)) = sys.solve() {
            return Ok(assemble(&h_monos, &vals[..nh]));
        }
    }
    Err(HftError::InfeasibleSystem)
}

/// Exterior Neumann problem: normal derivative (exterior-outward) `p` on the unit
/// sphere, limit 0 at infinity.
pub fn exterior_neumann(p: &Poly, ctx: &Context) -> Result<Expr> {
    let n = ctx.dim();
    let parts = sphere_harmonic_parts(p, ctx);
    let mut out = Expr::zero(ctx);
    for (m, g) in parts {
        let den = m as i64 + n as i64 - 2;
        if den == 0 {
            return Err(HftError::SolvabilityViolation("the integral of p over the unit circle must equal 0".into()));
        }
        out = out.add(&norm_pow_times(ctx, g.scale(&Rational::new(1.into(), den.into())), exterior_exponent(n, m)));
    }
    Ok(out.canonical())
}

/// Biharmonic function equal to `p` on the unit sphere with zero normal derivative.
pub fn bi_dirichlet(p: &Poly, ctx: &Context) -> Expr {
    let v = dirichlet_sphere(p, ctx);
    let mut w = Poly::zero();
    for (m, part) in v.homogeneous_parts_in(|u| ctx.is_coord(u)) {
        w.add_assign_ref(&part.scale(&Rational::new(m.into(), 2.into())));
    }
    let mut one_minus = Poly::one();
    for u in ctx.coords() {
        one_minus.add_term(Monomial::var_pow(u, 2), &Scalar::from_int(-1));
    }
    Expr::from_poly(ctx, v.add_ref(&one_minus.mul_ref(&w)))
}
