use std::collections::{BTreeMap, BTreeSet};

use hft_core::bvp::{self, AntiLaplacianMode, Quadric, Region};
use hft_core::harmonic::{self, BallIP, InnerProduct, SphereIP};
use hft_core::parse::{parse_expression, parse_list};
use hft_core::transforms::{self, Mirror};
use hft_core::{calculus, integrate, kernels};
use hft_core::{Context, Expr, HftError, Poly, QPoly, Rational, Result, Var};

use crate::output::Value;

pub const VERBS: &[&str] = &[
    "laplacian",
    "gradient",
    "partial",
    "normal-d",
    "divergence",
    "jacobian",
    "homogeneous",
    "taylor",
    "harmonic-conjugate",
    "volume",
    "surface-area",
    "integrate-sphere",
    "integrate-ball",
    "integrate-ellipsoid-area",
    "integrate-ellipsoid-volume",
    "dim-harmonic",
    "decompose",
    "basis-h",
    "zonal",
    "dirichlet",
    "anti-laplacian",
    "neumann",
    "exterior-neumann",
    "bi-dirichlet",
    "poisson-kernel",
    "poisson-kernel-h",
    "bergman-kernel",
    "bergman-kernel-h",
    "bergman-projection",
    "kelvin",
    "kelvin-h",
    "reflect",
    "phi",
    "eval",
    "approx",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Payload {
    None,
    Required,
    Optional,
}

/// Accepted option keys and payload requirement per verb.
fn signature(verb: &str) -> Option<(&'static [&'static str], Payload)> {
    use Payload::*;
    Some(match verb {
        "laplacian" => (&["power"], Required),
        "gradient" | "divergence" | "jacobian" => (&[], Required),
        "partial" => (&["wrt"], Required),
        "normal-d" => (&["surface"], Required),
        "homogeneous" | "taylor" => (&["m", "about"], Required),
        "harmonic-conjugate" => (&[], Required),
        "volume" | "surface-area" | "phi" => (&[], None),
        "integrate-sphere" => (&[], Required),
        "integrate-ball" => (&["denom"], Required),
        "integrate-ellipsoid-area" | "integrate-ellipsoid-volume" => (&["region"], Required),
        "dim-harmonic" => (&["m", "n"], None),
        "decompose" => (&[], Required),
        "basis-h" => (&["m", "ip"], None),
        "zonal" => (&["m", "unit", "with"], None),
        "dirichlet" => (&["region", "rhs", "outer"], Required),
        "anti-laplacian" => (&["multiple", "singularity"], Required),
        "neumann" => (&["region", "rhs"], Required),
        "exterior-neumann" | "bi-dirichlet" | "bergman-projection" => (&[], Required),
        "poisson-kernel" => (&["unit", "with"], None),
        "bergman-kernel" | "poisson-kernel-h" | "bergman-kernel-h" => (&["with"], None),
        "kelvin" | "kelvin-h" => (&[], Required),
        "reflect" => (&["mirror"], Optional),
        "eval" | "approx" => (&["at"], Required),
        _ => return Option::None,
    })
}

/// One invocation: verb, payload source, options and context flags.
#[derive(Debug, Clone, Default)]
pub struct Command {
    pub verb: String,
    pub payload: Option<String>,
    pub options: BTreeMap<String, String>,
    pub dim: Option<usize>,
    pub vars: Option<Vec<String>>,
    pub params: Vec<String>,
    pub vectors: Vec<String>,
    pub digits: usize,
}

fn bad(msg: impl Into<String>) -> HftError {
    HftError::InvalidArgument(msg.into())
}

impl Command {
    /// Splits trailing arguments into verb, payload and `key=value` options.
    pub fn from_args(args: &[String]) -> Result<Command> {
        let (verb, rest) =
            args.split_first().ok_or_else(|| bad(format!("missing verb; one of {}", VERBS.join(", "))))?;
        let (keys, payload_kind) = signature(verb).ok_or_else(|| bad(format!("unknown verb `{verb}`")))?;
        let mut cmd = Command { verb: verb.clone(), digits: 20, ..Command::default() };
        for arg in rest {
            match arg.split_once('=') {
                Some((k, v)) if !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') => {
                    if !keys.contains(&k) {
                        return Err(bad(format!("option `{k}` is not accepted by `{verb}`")));
                    }
                    if cmd.options.insert(k.to_string(), v.to_string()).is_some() {
                        return Err(bad(format!("option `{k}` given twice")));
                    }
                }
                _ => {
                    if cmd.payload.is_some() {
                        return Err(bad(format!(
                            "`{verb}` takes a single payload; quote expressions containing spaces"
                        )));
                    }
                    cmd.payload = Some(arg.clone());
                }
            }
        }
        match (payload_kind, cmd.payload.is_some()) {
            (Payload::Required, false) => Err(bad(format!("`{verb}` needs an expression payload"))),
            (Payload::None, true) => Err(bad(format!("`{verb}` takes no payload"))),
            _ => Ok(cmd),
        }
    }

    fn opt(&self, key: &str) -> Option<&str> {
        self.options.get(key).map(String::as_str)
    }

    fn payload(&self) -> &str {
        self.payload.as_deref().unwrap_or_default()
    }

    fn dim(&self) -> Result<usize> {
        let from_vars = self.vars.as_ref().filter(|v| v.len() > 1).map(Vec::len);
        match (self.dim, from_vars) {
            (Some(n), Some(m)) if n != m => Err(HftError::DimensionMismatch { expected: n, found: m }),
            (Some(0), _) => Err(bad("--dim must be positive")),
            (Some(n), _) | (None, Some(n)) => Ok(n),
            (None, None) => Err(bad(format!("`{}` needs --dim", self.verb))),
        }
    }

    /// Context with the coordinate names, declared vectors and `extra` vectors.
    fn context(&self, extra: &[&str]) -> Result<Context> {
        let n = self.dim()?;
        let mut b = Context::builder(n);
        let mut coord_vector = "x".to_string();
        match self.vars.as_deref() {
            Some([one]) if n > 1 => {
                coord_vector = one.clone();
                b = b.coord_vector(one);
            }
            Some(names) => b = b.coords(names),
            None => {}
        }
        let mut seen = BTreeSet::from([coord_vector]);
        for v in self.vectors.iter().map(String::as_str).chain(extra.iter().copied()) {
            if seen.insert(v.to_string()) {
                b = b.vector(v, n);
            }
        }
        Ok(b.extra_vars(&self.params).build())
    }

    /// Name of the second point's vector for kernel verbs.
    fn second(&self, default: &'static str) -> String {
        self.opt("with").unwrap_or(default).to_string()
    }
}

fn rational(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|_| bad(format!("`{s}` is not a rational number")))
}

fn rationals(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(rational).collect()
}

fn natural(cmd: &Command, key: &str) -> Result<Option<u32>> {
    cmd.opt(key)
        .map(|s| s.trim().parse::<u32>().map_err(|_| bad(format!("option `{key}` must be a non-negative integer"))))
        .transpose()
}

fn required_natural(cmd: &Command, key: &str) -> Result<u32> {
    natural(cmd, key)?.ok_or_else(|| bad(format!("`{}` needs option `{key}`", cmd.verb)))
}

fn poly(src: &str, ctx: &Context) -> Result<Poly> {
    parse_expression(src, ctx)?.to_polynomial()
}

fn qpoly(src: &str, ctx: &Context) -> Result<QPoly> {
    let p = poly(src, ctx)?;
    let mut out = QPoly::zero();
    for (m, c) in p.terms() {
        let q = c.as_rational().ok_or_else(|| bad(format!("`{src}` must have rational coefficients")))?;
        out.add_term(m.clone(), &q);
    }
    Ok(out)
}

/// `b;c;d` with `c` and `d` optional.
fn quadric(spec: &str) -> Result<Quadric> {
    let mut parts = spec.split(';');
    let b = rationals(parts.next().unwrap_or_default())?;
    let c = parts.next().filter(|s| !s.trim().is_empty()).map(rationals).transpose()?;
    let d = parts.next().map(rational).transpose()?;
    if parts.next().is_some() {
        return Err(bad(format!("quadric `{spec}` has more than three parts")));
    }
    Ok(Quadric::new(b, c, d))
}

fn region(spec: Option<&str>) -> Result<Region> {
    let spec = spec.unwrap_or("sphere");
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "sphere" => Ok(Region::Sphere),
        "exterior-sphere" => Ok(Region::ExteriorSphere),
        "annulus" => match rationals(arg)?.as_slice() {
            [r, s] => Ok(Region::Annulus(r.clone(), s.clone())),
            _ => Err(bad("annulus needs two radii, as annulus:r,s")),
        },
        "quadratic" => Ok(Region::Quadratic(quadric(arg)?)),
        _ => Err(bad(format!("unknown region `{spec}`"))),
    }
}

fn mirror(spec: Option<&str>) -> Result<Mirror> {
    let spec = spec.unwrap_or("unit-sphere");
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let split = |what: &str| -> Result<(Vec<Rational>, Rational)> {
        let (v, s) = arg.split_once(';').ok_or_else(|| bad(format!("{kind} needs `{what}`")))?;
        Ok((rationals(v)?, rational(s)?))
    };
    match kind {
        "unit-sphere" => Ok(Mirror::UnitSphere),
        "sphere" => {
            let (center, radius) = split("c1,..,cn;r")?;
            Ok(Mirror::SphereAt { center, radius })
        }
        "hyperplane" => {
            let (b, t) = split("b1,..,bn;t")?;
            Ok(Mirror::Hyperplane { b, t })
        }
        _ => Err(bad(format!("unknown mirror `{spec}`"))),
    }
}

fn var_named(ctx: &Context, name: &str) -> Result<Var> {
    ctx.var(name.trim()).ok_or_else(|| bad(format!("unknown variable `{}`", name.trim())))
}

fn vector_vars(ctx: &Context, name: &str) -> Result<Vec<Var>> {
    Ok(ctx.vector(name).ok_or_else(|| bad(format!("unknown vector `{name}`")))?.vars.clone())
}

/// `at=1/2,3,0` (coordinates in order) or `at=x1:1/2,b:3`.
fn point(ctx: &Context, spec: Option<&str>) -> Result<BTreeMap<Var, Rational>> {
    let mut out = BTreeMap::new();
    let Some(spec) = spec else { return Ok(out) };
    for (i, item) in spec.split(',').enumerate() {
        let (v, q) = match item.split_once(':') {
            Some((name, q)) => (var_named(ctx, name)?, rational(q)?),
            None if i < ctx.dim() => (ctx.coord(i), rational(item)?),
            None => return Err(bad(format!("point `{spec}` has more than {} coordinates", ctx.dim()))),
        };
        out.insert(v, q);
    }
    Ok(out)
}

fn units(cmd: &Command, allowed: &[&str]) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for u in cmd.opt("unit").unwrap_or_default().split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if !allowed.contains(&u) {
            return Err(bad(format!("`unit` accepts {}", allowed.join(", "))));
        }
        out.insert(u.to_string());
    }
    Ok(out)
}

fn exprs(v: Vec<Expr>) -> Value {
    Value::List(v.into_iter().map(Value::expr).collect())
}

/// Splits coordinates and a vector into the half-space form `((x, y), (t, u))`.
fn half_space(ctx: &Context, second: &str) -> Result<(Vec<QPoly>, QPoly, Vec<QPoly>, QPoly)> {
    let n = ctx.dim();
    if n < 2 {
        return Err(HftError::UnsupportedDimension(n));
    }
    let t = vector_vars(ctx, second)?;
    let qv = |v: &Var| QPoly::var(*v);
    let coords = ctx.coords();
    Ok((
        coords[..n - 1].iter().map(qv).collect(),
        qv(&coords[n - 1]),
        t[..n - 1].iter().map(qv).collect(),
        qv(&t[n - 1]),
    ))
}

pub fn execute(cmd: &Command) -> Result<Value> {
    let verb = cmd.verb.as_str();
    match verb {
        "volume" => Ok(Value::Scalar(integrate::unit_ball_volume(cmd.dim()?))),
        "surface-area" => Ok(Value::Scalar(integrate::unit_sphere_area(cmd.dim()?))),
        "dim-harmonic" => {
            let m = required_natural(cmd, "m")?;
            let n = match natural(cmd, "n")? {
                Some(n) => n as u64,
                None => cmd.dim()? as u64,
            };
            Ok(Value::Integer(harmonic::dim_harmonic(m as u64, n).to_string()))
        }
        "reflect" => reflect(cmd),
        "zonal" => {
            let m = required_natural(cmd, "m")?;
            let y = cmd.second("y");
            let ctx = cmd.context(&[&y])?;
            let unit = units(cmd, &["x", "y"])?;
            let z = harmonic::zonal_harmonic(m, ctx.dim());
            let p = z.expand(&ctx.coords(), &vector_vars(&ctx, &y)?, unit.contains("x"), unit.contains("y"));
            Ok(Value::poly(&ctx, p))
        }
        "poisson-kernel" | "bergman-kernel" => {
            let y = cmd.second("y");
            let ctx = cmd.context(&[&y])?;
            let yv = vector_vars(&ctx, &y)?;
            let k = if verb == "poisson-kernel" {
                kernels::poisson_kernel(&ctx, &ctx.coords(), &yv, units(cmd, &["y"])?.contains("y"))?
            } else {
                kernels::bergman_kernel(&ctx, &ctx.coords(), &yv)?
            };
            Ok(Value::expr(k))
        }
        "poisson-kernel-h" | "bergman-kernel-h" => {
            let t = cmd.second("t");
            let ctx = cmd.context(&[&t])?;
            let (x, y, t, u) = half_space(&ctx, &t)?;
            let k = if verb == "poisson-kernel-h" {
                kernels::poisson_kernel_h(&ctx, &x, &y, &t, &u)?
            } else {
                kernels::bergman_kernel_h(&ctx, &x, &y, &t, &u)?
            };
            Ok(Value::expr(k))
        }
        "basis-h" => {
            let m = required_natural(cmd, "m")?;
            let ctx = cmd.context(&[])?;
            let ip: Option<&dyn InnerProduct> = match cmd.opt("ip").unwrap_or("none") {
                "none" => None,
                "sphere" => Some(&SphereIP),
                "ball" => Some(&BallIP),
                other => return Err(bad(format!("unknown inner product `{other}`; use none, sphere or ball"))),
            };
            let basis = harmonic::basis_harmonic(m, &ctx, ip)?;
            Ok(Value::List(basis.into_iter().map(|p| Value::poly(&ctx, p)).collect()))
        }
        "phi" => Ok(exprs(transforms::phi_map(&cmd.context(&[])?)?)),
        _ => with_payload(cmd),
    }
}

fn reflect(cmd: &Command) -> Result<Value> {
    let m = mirror(cmd.opt("mirror"))?;
    match &cmd.payload {
        Some(src) => {
            let x = rationals(src)?;
            if let Some(n) = cmd.dim {
                if n != x.len() {
                    return Err(HftError::DimensionMismatch { expected: n, found: x.len() });
                }
            }
            let r = transforms::reflect_point(&x, &m)?;
            Ok(Value::List(r.into_iter().map(|q| Value::Scalar(hft_core::Scalar::from_rational(q))).collect()))
        }
        None => Ok(exprs(transforms::reflect(&cmd.context(&[])?, &m)?)),
    }
}

fn with_payload(cmd: &Command) -> Result<Value> {
    let ctx = cmd.context(&[])?;
    let src = cmd.payload();
    let e = || parse_expression(src, &ctx);
    let p = || poly(src, &ctx);
    let about = || -> Result<Option<Vec<Poly>>> {
        cmd.opt("about")
            .map(|s| parse_list(s, &ctx)?.iter().map(Expr::to_polynomial).collect::<Result<Vec<_>>>())
            .transpose()
    };
    match cmd.verb.as_str() {
        "laplacian" => Ok(Value::expr(calculus::laplacian(&e()?, natural(cmd, "power")?.unwrap_or(1)))),
        "gradient" => Ok(exprs(calculus::gradient(&e()?))),
        "partial" => {
            let mut schedule = Vec::new();
            for item in cmd.opt("wrt").ok_or_else(|| bad("`partial` needs option `wrt`, as wrt=x1:2,x3"))?.split(',') {
                let (name, k) = item.split_once(':').unwrap_or((item, "1"));
                let k = k.trim().parse::<u32>().map_err(|_| bad(format!("bad derivative order in `{item}`")))?;
                schedule.push((var_named(&ctx, name)?, k));
            }
            Ok(Value::expr(calculus::partial_d(&e()?, &schedule)))
        }
        "normal-d" => match cmd.opt("surface") {
            None => Ok(Value::expr(calculus::normal_d_sphere(&e()?)?)),
            Some(q) => Ok(Value::expr(calculus::normal_d_surface(&e()?, &qpoly(q, &ctx)?)?)),
        },
        "divergence" => Ok(Value::expr(calculus::divergence(&parse_list(src, &ctx)?)?)),
        "jacobian" => {
            let rows = calculus::jacobian(&parse_list(src, &ctx)?);
            Ok(Value::List(rows.into_iter().map(exprs).collect()))
        }
        "homogeneous" => {
            let m = required_natural(cmd, "m")?;
            Ok(Value::poly(&ctx, calculus::homogeneous_part(&p()?, m, &ctx, about()?.as_deref())?))
        }
        "taylor" => {
            let m = required_natural(cmd, "m")?;
            Ok(Value::poly(&ctx, calculus::taylor_poly(&p()?, m, &ctx, about()?.as_deref())?))
        }
        "harmonic-conjugate" => Ok(Value::poly(&ctx, calculus::harmonic_conjugate_2d(&p()?, &ctx)?)),
        "integrate-sphere" => Ok(Value::poly(&ctx, integrate::integrate_sphere_expr(&e()?)?)),
        "integrate-ball" => {
            let denom = match cmd.opt("denom") {
                None => None,
                Some(s) => match rationals(s)?.as_slice() {
                    [c0, c1] => Some((c0.clone(), c1.clone())),
                    _ => return Err(bad("denom needs two numbers, as denom=c0,c1 for c0 + c1*norm(x)")),
                },
            };
            Ok(Value::poly(&ctx, integrate::integrate_ball_expr(&e()?, denom)?))
        }
        "integrate-ellipsoid-area" | "integrate-ellipsoid-volume" => {
            let Region::Quadratic(q) = region(cmd.opt("region"))? else {
                return Err(bad("ellipsoid integrals need region=quadratic:b;c;d"));
            };
            let out = if cmd.verb == "integrate-ellipsoid-area" {
                integrate::integrate_ellipsoid_area_poly(&p()?, &q.b, &q.c, &q.d, &ctx)?
            } else {
                integrate::integrate_ellipsoid_volume_poly(&p()?, &q.b, &q.c, &q.d, &ctx)?
            };
            Ok(Value::poly(&ctx, out))
        }
        "decompose" => {
            let d = harmonic::harmonic_decompose(&p()?, &ctx);
            let pairs = d
                .pairs
                .into_iter()
                .map(|(h, k)| Value::List(vec![Value::poly(&ctx, h), Value::Integer(k.to_string())]));
            Ok(Value::List(pairs.collect()))
        }
        "dirichlet" => {
            let reg = region(cmd.opt("region"))?;
            let rhs = cmd.opt("rhs").map(|s| poly(s, &ctx)).transpose()?;
            let inner = p()?;
            let out = match cmd.opt("outer") {
                Some(s) => {
                    if !matches!(reg, Region::Annulus(..)) {
                        return Err(bad("option `outer` only applies to region=annulus:r,s"));
                    }
                    bvp::dirichlet_pair(&inner, &poly(s, &ctx)?, &reg, rhs.as_ref(), &ctx)?
                }
                None => bvp::dirichlet(&inner, &reg, rhs.as_ref(), &ctx)?,
            };
            Ok(Value::expr(out))
        }
        "anti-laplacian" => {
            let singular = match cmd.opt("singularity") {
                None => false,
                Some("0") => true,
                Some(other) => return Err(bad(format!("singularity={other} is not supported; only singularity=0"))),
            };
            let mode = match cmd.opt("multiple") {
                None => AntiLaplacianMode::Plain { singularity_at_zero: singular },
                Some(_) if singular => return Err(bad("`singularity` and `multiple` cannot be combined")),
                Some("norm2") => AntiLaplacianMode::NormSquaredMultiple,
                Some(m) => match m.split_once(':') {
                    Some(("quadratic", q)) => AntiLaplacianMode::QuadraticMultiple(quadric(q)?),
                    _ => return Err(bad(format!("unknown multiple `{m}`; use norm2 or quadratic:b;c;d"))),
                },
            };
            Ok(Value::expr(bvp::anti_laplacian(&e()?, &mode, &ctx)?))
        }
        "neumann" => {
            let rhs = cmd.opt("rhs").map(|s| poly(s, &ctx)).transpose()?;
            match region(cmd.opt("region"))? {
                Region::Sphere => Ok(Value::expr(bvp::neumann_sphere(&p()?, rhs.as_ref(), &ctx)?)),
                Region::Quadratic(q) => Ok(Value::poly(&ctx, bvp::neumann_quadratic(&p()?, rhs.as_ref(), &q, &ctx)?)),
                _ => Err(bad("neumann supports region=sphere or region=quadratic:b;c;d")),
            }
        }
        "exterior-neumann" => Ok(Value::expr(bvp::exterior_neumann(&p()?, &ctx)?)),
        "bi-dirichlet" => Ok(Value::expr(bvp::bi_dirichlet(&p()?, &ctx))),
        "bergman-projection" => Ok(Value::poly(&ctx, kernels::bergman_projection(&p()?, &ctx)?)),
        "kelvin" => Ok(Value::expr(transforms::kelvin(&e()?)?)),
        "kelvin-h" => Ok(Value::expr(transforms::kelvin_h(&e()?)?)),
        "eval" | "approx" => {
            let s = e()?.eval_at(&point(&ctx, cmd.opt("at"))?)?;
            Ok(if cmd.verb == "eval" { Value::Scalar(s) } else { Value::Text(s.approx(cmd.digits)) })
        }
        other => Err(HftError::Internal(format!("verb `{other}` has no handler"))),
    }
}
