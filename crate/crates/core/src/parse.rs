//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := ('-'|'+') unary | factor
//! factor := atom ('^' exponent)?
//! exponent := '-'? int | '(' '-'? int ('/' int)? ')'
//! atom   := int | ident | 'pi' | norm(vec) | norm2(vec) | dot(vec, vec)
//!         | log(expr) | sqrt(expr) | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::context::Context;
use crate::error::{HftError, Result};
use crate::expr::{BaseFactor, Expr};
use crate::scalar::Scalar;
use crate::{Poly, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push(Token { tok: Tok::Int(s.parse().unwrap()), line: start.0, col: start.1 });
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: start.0, col: start.1 });
        } else if "+-*/^(),".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line, col });
            i += 1;
            col += 1;
        } else {
            return Err(HftError::Parse {
                line,
                column: col,
                expected: vec!["expression".into()],
                found: format!("`{c}`"),
            });
        }
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

/// Syntax tree; identifiers keep their source position for error reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseTree {
    Int(BigInt),
    Var { name: String, line: usize, column: usize },
    Call { name: String, args: Vec<ParseTree>, line: usize, column: usize },
    Neg(Box<ParseTree>),
    Add(Box<ParseTree>, Box<ParseTree>),
    Sub(Box<ParseTree>, Box<ParseTree>),
    Mul(Box<ParseTree>, Box<ParseTree>),
    Div(Box<ParseTree>, Box<ParseTree>),
    Pow(Box<ParseTree>, Rational),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> HftError {
        let t = self.peek();
        HftError::Parse {
            line: t.line,
            column: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: describe(&t.tok),
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("{c}")]))
        }
    }

    fn expr(&mut self) -> Result<ParseTree> {
        let mut lhs = self.term()?;
        loop {
            if self.is_sym('+') {
                self.bump();
                lhs = ParseTree::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.is_sym('-') {
                self.bump();
                lhs = ParseTree::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ParseTree> {
        let mut lhs = self.unary()?;
        loop {
            if self.is_sym('*') {
                self.bump();
                lhs = ParseTree::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.is_sym('/') {
                self.bump();
                lhs = ParseTree::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ParseTree> {
        if self.is_sym('-') {
            self.bump();
            return Ok(ParseTree::Neg(Box::new(self.unary()?)));
        }
        if self.is_sym('+') {
            self.bump();
            return self.unary();
        }
        self.factor()
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn exponent(&mut self) -> Result<Rational> {
        if self.is_sym('(') {
            self.bump();
            let neg = self.is_sym('-');
            if neg {
                self.bump();
            }
            let n = self.int()?;
            let d = if self.is_sym('/') {
                self.bump();
                self.int()?
            } else {
                BigInt::one()
            };
            self.expect_sym(')')?;
            if d.is_zero() {
                return Err(HftError::InvalidArgument("zero denominator in exponent".into()));
            }
            let q = Rational::new(n, d);
            return Ok(if neg { -q } else { q });
        }
        let neg = self.is_sym('-');
        if neg {
            self.bump();
        }
        let n = match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.bump();
                n
            }
            _ => return Err(self.error(&["integer", "-", "("])),
        };
        Ok(Rational::from_integer(if neg { -n } else { n }))
    }

    fn factor(&mut self) -> Result<ParseTree> {
        let base = self.atom()?;
        if self.is_sym('^') {
            self.bump();
            let e = self.exponent()?;
            return Ok(ParseTree::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ParseTree> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.bump();
                Ok(ParseTree::Int(n))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.is_sym('(') {
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while self.is_sym(',') {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    if !self.is_sym(')') {
                        return Err(self.error(&[")", ","]));
                    }
                    self.bump();
                    Ok(ParseTree::Call { name, args, line: t.line, column: t.col })
                } else {
                    Ok(ParseTree::Var { name, line: t.line, column: t.col })
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            _ => Err(self.error(&["number", "identifier", "("])),
        }
    }
}

/// Parses `src` into a syntax tree.
pub fn parse_tree(src: &str) -> Result<ParseTree> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.error(&["+", "-", "*", "/", "^", "end of input"]));
    }
    Ok(e)
}

/// Parses `src` and evaluates it in `ctx`.
pub fn parse_expression(src: &str, ctx: &Context) -> Result<Expr> {
    Ok(to_expr(&parse_tree(src)?, ctx)?.canonical())
}

/// Parses a comma-separated list of expressions.
pub fn parse_list(src: &str, ctx: &Context) -> Result<Vec<Expr>> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let mut out = vec![to_expr(&p.expr()?, ctx)?.canonical()];
    while p.is_sym(',') {
        p.bump();
        out.push(to_expr(&p.expr()?, ctx)?.canonical());
    }
    if p.peek().tok != Tok::End {
        return Err(p.error(&[",", "end of input"]));
    }
    Ok(out)
}

fn vector_arg<'a>(arg: &ParseTree, ctx: &'a Context) -> Result<&'a crate::context::VectorDef> {
    match arg {
        ParseTree::Var { name, line, column } => ctx.vector(name).ok_or_else(|| HftError::UnknownVariable {
            name: name.clone(),
            line: *line,
            column: *column,
        }),
        _ => Err(HftError::InvalidArgument("expected a vector name".into())),
    }
}

fn arity(name: &str, args: &[ParseTree], n: usize) -> Result<()> {
    if args.len() != n {
        return Err(HftError::InvalidArgument(format!("{name} takes {n} argument(s)")));
    }
    Ok(())
}

/// Square root of `c * prod B^(h/2)` with constant `c` and even `h`, or of a
/// rational polynomial, which is registered as a new base.
fn sqrt_expr(e: &Expr) -> Result<Expr> {
    let ctx = e.ctx();
    let c = e.canonical();
    if c.is_zero() {
        return Ok(c);
    }
    let unsupported = || HftError::UnsupportedBase(format!("square root of {c}"));
    if let Some((k, factors)) = c.as_base_monomial() {
        if factors.iter().all(|f| f.log_pow == 0 && f.half_exp % 2 == 0) {
            let fs: Vec<BaseFactor> =
                factors.iter().map(|f| BaseFactor { base: f.base, half_exp: f.half_exp / 2, log_pow: 0 }).collect();
            return Ok(Expr::from_term(ctx, Poly::constant(k.sqrt()?), fs).canonical());
        }
        return Err(unsupported());
    }
    match c.as_polynomial().as_ref().and_then(rational_poly) {
        Some(q) => Expr::base_pow(ctx, &q, 1),
        None => Err(unsupported()),
    }
}

fn rational_poly(p: &Poly) -> Option<crate::QPoly> {
    let mut out = crate::QPoly::zero();
    for (m, c) in p.terms() {
        out.add_term(m.clone(), &c.as_rational()?);
    }
    Some(out)
}

/// Logarithm of `c * prod B^(h/2)` with positive rational `c`.
fn log_expr(e: &Expr) -> Result<Expr> {
    let ctx = e.ctx();
    let unsupported = || HftError::UnsupportedBase(format!("logarithm of {}", e.canonical()));
    let (c, factors) = e.as_base_monomial().ok_or_else(unsupported)?;
    if factors.iter().any(|f| f.log_pow > 0) {
        return Err(unsupported());
    }
    let q = c.as_rational().filter(|q| q.is_positive()).ok_or_else(unsupported)?;
    let mut out = Expr::constant(ctx, Scalar::log_rational(&q)?);
    for f in &factors {
        let half = Rational::new(f.half_exp.into(), 2.into());
        out = out.add(&Expr::base_log(ctx, f.base, 1).scale(&half));
    }
    Ok(out)
}

/// Evaluates a syntax tree in `ctx`.
pub fn to_expr(t: &ParseTree, ctx: &Context) -> Result<Expr> {
    Ok(match t {
        ParseTree::Int(n) => Expr::rational(ctx, Rational::from_integer(n.clone())),
        ParseTree::Var { name, line, column } => match ctx.var(name) {
            Some(v) => Expr::var(ctx, v),
            None if name == "pi" => Expr::constant(ctx, Scalar::pi()),
            None => return Err(HftError::UnknownVariable { name: name.clone(), line: *line, column: *column }),
        },
        ParseTree::Call { name, args, line, column } => match name.as_str() {
            "norm" => {
                arity(name, args, 1)?;
                Expr::base_factor(ctx, vector_arg(&args[0], ctx)?.norm_base, 1)
            }
            "norm2" => {
                arity(name, args, 1)?;
                Expr::base_factor(ctx, vector_arg(&args[0], ctx)?.norm_base, 2).canonical()
            }
            "dot" => {
                arity(name, args, 2)?;
                let a = vector_arg(&args[0], ctx)?;
                let b = vector_arg(&args[1], ctx)?;
                if a.vars.len() != b.vars.len() {
                    return Err(HftError::DimensionMismatch { expected: a.vars.len(), found: b.vars.len() });
                }
                let mut p = Poly::zero();
                for (u, v) in a.vars.iter().zip(&b.vars) {
                    p = p.add_ref(&Poly::var(*u).mul_ref(&Poly::var(*v)));
                }
                Expr::from_poly(ctx, p)
            }
            "log" => {
                arity(name, args, 1)?;
                log_expr(&to_expr(&args[0], ctx)?)?
            }
            "sqrt" => {
                arity(name, args, 1)?;
                sqrt_expr(&to_expr(&args[0], ctx)?)?
            }
            _ => return Err(HftError::UnknownVariable { name: name.clone(), line: *line, column: *column }),
        },
        ParseTree::Neg(a) => to_expr(a, ctx)?.neg(),
        ParseTree::Add(a, b) => to_expr(a, ctx)?.add(&to_expr(b, ctx)?),
        ParseTree::Sub(a, b) => to_expr(a, ctx)?.sub(&to_expr(b, ctx)?),
        ParseTree::Mul(a, b) => to_expr(a, ctx)?.mul(&to_expr(b, ctx)?).canonical(),
        ParseTree::Div(a, b) => to_expr(a, ctx)?.mul(&invert(&to_expr(b, ctx)?)?).canonical(),
        ParseTree::Pow(a, e) => {
            let base = to_expr(a, ctx)?;
            let to_i32 =
                |n: &BigInt| n.to_i32().ok_or_else(|| HftError::InvalidArgument("exponent out of range".into()));
            if e.is_integer() {
                let k = to_i32(e.numer())?;
                if let Some(single) = single_factor_power(&base, k) {
                    single
                } else if k < 0 {
                    invert(&base)?.powi(-k)?
                } else {
                    base.powi(k)?
                }
            } else if *e.denom() == BigInt::from(2) {
                sqrt_expr(&base)?.powi(to_i32(e.numer())?)?
            } else {
                return Err(HftError::InvalidArgument(format!("unsupported exponent {e}")));
            }
        }
    })
}

/// Inverse of a base monomial; a rational polynomial that is not one is
/// registered as a new base.
fn invert(e: &Expr) -> Result<Expr> {
    match e.try_inverse() {
        Ok(inv) => Ok(inv),
        Err(err) => match e.canonical().as_polynomial().as_ref().and_then(rational_poly) {
            Some(q) if !q.is_constant() => Expr::base_pow(e.ctx(), &q, -2),
            _ => Err(err),
        },
    }
}

/// Powers of a bare base factor stay exact without canonicalizing first.
fn single_factor_power(e: &Expr, k: i32) -> Option<Expr> {
    if e.num_terms() != 1 {
        return None;
    }
    let (factors, poly) = e.terms().next()?;
    if factors.len() != 1 || factors[0].log_pow > 0 || poly != &Poly::one() {
        return None;
    }
    let f = &factors[0];
    Some(Expr::base_factor(e.ctx(), f.base, f.half_exp * k).canonical())
}
