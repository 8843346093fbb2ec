use hft_core::render::{expr_json, expr_latex, expr_text};
use hft_core::{Context, Expr, Poly, Scalar};
use serde_json::Value as Json;

/// A command result before rendering.
#[derive(Debug, Clone)]
pub enum Value {
    Expr(Expr),
    Scalar(Scalar),
    Integer(String),
    Text(String),
    List(Vec<Value>),
}

impl Value {
    /// Constant polynomials collapse to scalars.
    pub fn poly(ctx: &Context, p: Poly) -> Value {
        if p.vars().is_empty() {
            Value::Scalar(p.constant_term())
        } else {
            Value::Expr(Expr::from_poly(ctx, p))
        }
    }

    pub fn expr(e: Expr) -> Value {
        match e.as_polynomial() {
            Some(p) if p.vars().is_empty() => Value::Scalar(p.constant_term()),
            _ => Value::Expr(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Latex,
}

pub fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Text => text(v),
        Format::Json => json(v).to_string(),
        Format::Latex => latex(v),
    }
}

pub fn text(v: &Value) -> String {
    match v {
        Value::Expr(e) => expr_text(e),
        Value::Scalar(s) => s.to_string(),
        Value::Integer(s) | Value::Text(s) => s.clone(),
        Value::List(items) => format!("[{}]", items.iter().map(text).collect::<Vec<_>>().join(", ")),
    }
}

pub fn json(v: &Value) -> Json {
    match v {
        Value::Expr(e) => expr_json(e),
        Value::Scalar(s) => s.to_json(),
        Value::Integer(s) | Value::Text(s) => Json::String(s.clone()),
        Value::List(items) => Json::Array(items.iter().map(json).collect()),
    }
}

pub fn latex(v: &Value) -> String {
    match v {
        Value::Expr(e) => expr_latex(e),
        Value::Scalar(s) => s.to_latex(),
        Value::Integer(s) => s.clone(),
        Value::Text(s) => format!("\\text{{{s}}}"),
        Value::List(items) => {
            format!("\\left( {} \\right)", items.iter().map(latex).collect::<Vec<_>>().join(",\\ "))
        }
    }
}
