//! Text, LaTeX and JSON renderings. The text form parses back to the same value.

use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::context::{BaseKind, Context};
use crate::expr::{BaseFactor, Expr};
use crate::poly::Monomial;
use crate::scalar::Scalar;
use crate::Poly;

fn mono_text(m: &Monomial, ctx: &Context) -> String {
    m.exps()
        .iter()
        .map(|(v, e)| if *e == 1 { ctx.var_name(*v).to_string() } else { format!("{}^{e}", ctx.var_name(*v)) })
        .collect::<Vec<_>>()
        .join("*")
}

/// Negative single-term coefficient, rendered by magnitude after a minus sign.
fn split_sign(c: &Scalar) -> (bool, Scalar) {
    match c.terms() {
        [t] if t.coeff.is_negative() => (true, -c.clone()),
        _ => (false, c.clone()),
    }
}

fn coeff_mono_text(c: &Scalar, m: &Monomial, ctx: &Context) -> String {
    if m.is_one() {
        return c.to_string();
    }
    let mono = mono_text(m, ctx);
    if c.is_single_term() && c.as_rational().is_some_and(|q| q.is_one()) {
        return mono;
    }
    if c.needs_parens() {
        format!("({c})*{mono}")
    } else {
        format!("{c}*{mono}")
    }
}

/// Sum of terms in descending graded-lex order.
pub fn poly_text(p: &Poly, ctx: &Context) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let (neg, mag) = split_sign(c);
        let t = coeff_mono_text(&mag, m, ctx);
        match (i, neg) {
            (0, true) => out.push_str(&format!("-{t}")),
            (0, false) => out.push_str(&t),
            (_, true) => out.push_str(&format!(" - {t}")),
            (_, false) => out.push_str(&format!(" + {t}")),
        }
    }
    out
}

fn factor_text(f: &BaseFactor, ctx: &Context) -> Vec<String> {
    let base = ctx.base(f.base);
    let mut out = Vec::new();
    match &base.kind {
        BaseKind::NormSq { vector } => {
            if f.half_exp != 0 {
                out.push(if f.half_exp == 1 {
                    format!("norm({vector})")
                } else {
                    format!("norm({vector})^{}", f.half_exp)
                });
            }
            if f.log_pow > 0 {
                out.push(if f.log_pow == 1 {
                    format!("log(norm2({vector}))")
                } else {
                    format!("log(norm2({vector}))^{}", f.log_pow)
                });
            }
        }
        BaseKind::General => {
            let b = poly_text(&base.poly.to_coeff(), ctx);
            if f.half_exp != 0 {
                out.push(if f.half_exp % 2 == 0 {
                    format!("({b})^{}", f.half_exp / 2)
                } else {
                    format!("({b})^({}/2)", f.half_exp)
                });
            }
            if f.log_pow > 0 {
                out.push(if f.log_pow == 1 { format!("log({b})") } else { format!("log({b})^{}", f.log_pow) });
            }
        }
    }
    out
}

pub fn expr_text(e: &Expr) -> String {
    let ctx = e.ctx();
    let mut parts: Vec<String> = Vec::new();
    for (factors, p) in e.terms() {
        let fs: Vec<String> = factors.iter().flat_map(|f| factor_text(f, ctx)).collect();
        if fs.is_empty() {
            parts.push(poly_text(p, ctx));
            continue;
        }
        let body = if p.len() == 1 {
            let (m, c) = p.terms().next().unwrap();
            let (neg, mag) = split_sign(c);
            let head = if m.is_one() && mag.as_rational().is_some_and(|q| q.is_one()) {
                None
            } else if m.is_one() && mag.needs_parens() {
                Some(format!("({mag})"))
            } else {
                Some(coeff_mono_text(&mag, m, ctx))
            };
            let core = match head {
                Some(h) => format!("{h}*{}", fs.join("*")),
                None => fs.join("*"),
            };
            if neg {
                format!("-{core}")
            } else {
                core
            }
        } else {
            format!("({})*{}", poly_text(p, ctx), fs.join("*"))
        };
        parts.push(body);
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        match p.strip_prefix('-') {
            Some(rest) => out.push_str(&format!(" - {rest}")),
            None => out.push_str(&format!(" + {p}")),
        }
    }
    out
}

fn latex_var(name: &str) -> String {
    let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    if split < name.len() && split > 0 {
        format!("{}_{{{}}}", &name[..split], &name[split..])
    } else {
        name.to_string()
    }
}

fn mono_latex(m: &Monomial, ctx: &Context) -> String {
    m.exps()
        .iter()
        .map(|(v, e)| {
            let n = latex_var(ctx.var_name(*v));
            if *e == 1 {
                n
            } else {
                format!("{n}^{{{e}}}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn poly_latex(p: &Poly, ctx: &Context) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let (neg, mag) = split_sign(c);
        let coeff = if m.is_one() {
            mag.to_latex()
        } else if mag.as_rational().is_some_and(|q| q.is_one()) {
            String::new()
        } else if mag.needs_parens() {
            format!("\\left({}\\right) ", mag.to_latex())
        } else {
            format!("{} ", mag.to_latex())
        };
        let t = format!("{coeff}{}", if m.is_one() { String::new() } else { mono_latex(m, ctx) });
        match (i, neg) {
            (0, true) => out.push_str(&format!("-{t}")),
            (0, false) => out.push_str(&t),
            (_, true) => out.push_str(&format!(" - {t}")),
            (_, false) => out.push_str(&format!(" + {t}")),
        }
    }
    out
}

fn factor_latex(f: &BaseFactor, ctx: &Context) -> String {
    let base = ctx.base(f.base);
    let (norm, norm2) = match &base.kind {
        BaseKind::NormSq { vector } => (format!("\\lVert {vector} \\rVert"), format!("\\lVert {vector} \\rVert^{{2}}")),
        BaseKind::General => {
            let b = poly_latex(&base.poly.to_coeff(), ctx);
            (format!("\\left({b}\\right)^{{1/2}}"), format!("\\left({b}\\right)"))
        }
    };
    let mut parts = Vec::new();
    if f.half_exp != 0 {
        parts.push(match &base.kind {
            BaseKind::NormSq { .. } if f.half_exp == 1 => norm,
            BaseKind::NormSq { .. } => format!("{norm}^{{{}}}", f.half_exp),
            BaseKind::General if f.half_exp % 2 == 0 => format!("{norm2}^{{{}}}", f.half_exp / 2),
            BaseKind::General => format!("{norm2}^{{{}/2}}", f.half_exp),
        });
    }
    if f.log_pow > 0 {
        parts.push(if f.log_pow == 1 {
            format!("\\log\\left({norm2}\\right)")
        } else {
            format!("\\log^{{{}}}\\left({norm2}\\right)", f.log_pow)
        });
    }
    parts.join(" ")
}

pub fn expr_latex(e: &Expr) -> String {
    let ctx = e.ctx();
    let mut parts = Vec::new();
    for (factors, p) in e.terms() {
        let fs: Vec<String> = factors.iter().map(|f| factor_latex(f, ctx)).collect();
        if fs.is_empty() {
            parts.push(poly_latex(p, ctx));
        } else {
            parts.push(format!("\\left({}\\right) {}", poly_latex(p, ctx), fs.join(" ")));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

pub fn expr_json(e: &Expr) -> Value {
    let ctx = e.ctx();
    let terms: Vec<Value> = e
        .terms()
        .map(|(factors, p)| {
            json!({
                "poly": poly_text(p, ctx),
                "factors": factors.iter().map(|f| json!({
                    "base": ctx.base_label(f.base),
                    "halfExp": f.half_exp,
                    "logPow": f.log_pow,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "terms": terms })
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", expr_text(self))
    }
}
