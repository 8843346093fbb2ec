//! Variable tables and the registry of square-free bases.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{HftError, Result};
use crate::poly::{Monomial, Var};
use crate::{QPoly, Rational};

pub type BaseId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseKind {
    /// `||v||^2` over the components of a named vector.
    NormSq {
        vector: String,
    },
    General,
}

/// A registered base: primitive integer polynomial with positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseEntry {
    pub poly: QPoly,
    pub kind: BaseKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorDef {
    pub name: String,
    pub vars: Vec<Var>,
    pub norm_base: BaseId,
}

#[derive(Debug, Default)]
struct Registry {
    bases: Vec<Arc<BaseEntry>>,
    index: HashMap<QPoly, BaseId>,
}

#[derive(Debug)]
struct Inner {
    dim: usize,
    names: Vec<String>,
    vectors: Vec<VectorDef>,
    registry: RwLock<Registry>,
}

/// Coordinates, extra variables and the base registry shared by expressions.
/// Cloning is cheap and clones share the registry.
#[derive(Debug, Clone)]
pub struct Context(Arc<Inner>);

pub struct ContextBuilder {
    dim: usize,
    coord_names: Vec<String>,
    coord_vector: String,
    extras: Vec<String>,
    vectors: Vec<(String, usize)>,
}

impl ContextBuilder {
    pub fn coords<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.dim = names.len();
        self.coord_names = names.iter().map(|s| s.as_ref().to_string()).collect();
        self
    }

    pub fn coord_vector(mut self, name: &str) -> Self {
        self.coord_vector = name.to_string();
        if self.coord_names.iter().enumerate().all(|(i, n)| *n == format!("x{}", i + 1)) {
            self.coord_names = (1..=self.dim).map(|i| format!("{name}{i}")).collect();
        }
        self
    }

    pub fn extra_vars<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.extras.extend(names.iter().map(|s| s.as_ref().to_string()));
        self
    }

    /// Adds variables `name1..name{len}` with their own norm base.
    pub fn vector(mut self, name: &str, len: usize) -> Self {
        self.vectors.push((name.to_string(), len));
        self
    }

    pub fn build(self) -> Context {
        let mut names = self.coord_names.clone();
        let mut vectors =
            vec![VectorDef { name: self.coord_vector.clone(), vars: (0..self.dim as Var).collect(), norm_base: 0 }];
        for (name, len) in &self.vectors {
            let start = names.len() as Var;
            names.extend((1..=*len).map(|i| format!("{name}{i}")));
            vectors.push(VectorDef { name: name.clone(), vars: (start..start + *len as Var).collect(), norm_base: 0 });
        }
        names.extend(self.extras.iter().cloned());
        let mut registry = Registry::default();
        for v in &mut vectors {
            let p = norm_sq_poly(&v.vars);
            if p.is_zero() {
                continue;
            }
            let id = registry.bases.len() as BaseId;
            registry.index.insert(p.clone(), id);
            registry.bases.push(Arc::new(BaseEntry { poly: p, kind: BaseKind::NormSq { vector: v.name.clone() } }));
            v.norm_base = id;
        }
        let inner = Inner { dim: self.dim, names, vectors, registry: RwLock::new(registry) };
        Context(Arc::new(inner))
    }
}

fn norm_sq_poly(vars: &[Var]) -> QPoly {
    let mut p = QPoly::zero();
    for &v in vars {
        p.add_term(Monomial::var_pow(v, 2), &Rational::one());
    }
    p
}

impl Context {
    /// Context with coordinates `x1..xn`.
    pub fn new(dim: usize) -> Self {
        Self::builder(dim).build()
    }

    pub fn builder(dim: usize) -> ContextBuilder {
        ContextBuilder {
            dim,
            coord_names: (1..=dim).map(|i| format!("x{i}")).collect(),
            coord_vector: "x".into(),
            extras: Vec::new(),
            vectors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn coords(&self) -> Vec<Var> {
        (0..self.0.dim as Var).collect()
    }

    pub fn coord(&self, i: usize) -> Var {
        i as Var
    }

    pub fn is_coord(&self, v: Var) -> bool {
        (v as usize) < self.0.dim
    }

    pub fn var_count(&self) -> usize {
        self.0.names.len()
    }

    pub fn var_name(&self, v: Var) -> &str {
        &self.0.names[v as usize]
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.0.names.iter().position(|n| n == name).map(|i| i as Var)
    }

    pub fn coord_vector(&self) -> &VectorDef {
        &self.0.vectors[0]
    }

    pub fn vector(&self, name: &str) -> Option<&VectorDef> {
        self.0.vectors.iter().find(|v| v.name == name)
    }

    pub fn vectors(&self) -> &[VectorDef] {
        &self.0.vectors
    }

    /// Base id of `||x||^2` over the coordinates.
    pub fn norm_base(&self) -> BaseId {
        self.0.vectors[0].norm_base
    }

    pub fn same(&self, other: &Context) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn base(&self, id: BaseId) -> Arc<BaseEntry> {
        self.0.registry.read().expect("registry lock").bases[id as usize].clone()
    }

    pub fn base_count(&self) -> usize {
        self.0.registry.read().expect("registry lock").bases.len()
    }

    /// Registers `p = c * B` with `B` primitive, returning `(id(B), c)`.
    pub fn register_base(&self, p: &QPoly) -> Result<(BaseId, Rational)> {
        if p.is_constant() {
            return Err(HftError::UnsupportedBase("constant polynomial".into()));
        }
        let (prim, content) = primitive_part(p);
        if let Some(id) = self.0.registry.read().expect("registry lock").index.get(&prim) {
            return Ok((*id, content));
        }
        let mut reg = self.0.registry.write().expect("registry lock");
        if let Some(id) = reg.index.get(&prim) {
            return Ok((*id, content));
        }
        let id = reg.bases.len() as BaseId;
        reg.index.insert(prim.clone(), id);
        reg.bases.push(Arc::new(BaseEntry { poly: prim, kind: BaseKind::General }));
        Ok((id, content))
    }

    pub fn base_label(&self, id: BaseId) -> String {
        let b = self.base(id);
        match &b.kind {
            BaseKind::NormSq { vector } => format!("normSq({vector})"),
            BaseKind::General => crate::render::poly_text(&b.poly.to_coeff(), self),
        }
    }
}

/// Splits `p` as `content * prim` with `prim` a primitive integer polynomial
/// whose leading coefficient is positive.
pub fn primitive_part(p: &QPoly) -> (QPoly, Rational) {
    let mut l = BigInt::one();
    for (_, c) in p.terms() {
        l = l.lcm(c.denom());
    }
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        g = g.gcd(&(c.numer() * (&l / c.denom())));
    }
    let mut content = Rational::new(g, l);
    if p.leading().is_some_and(|(_, c)| c.is_negative()) {
        content = -content;
    }
    let inv = content.recip();
    (p.scale(&inv), content)
}
