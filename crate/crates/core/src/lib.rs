//! Exact computer algebra for harmonic function theory: harmonic polynomials,
//! boundary value problems on spheres, annuli and ellipsoids, Poisson and
//! Bergman kernels, and Kelvin-type transforms.
//!
//! Polynomials and the linear solver are generic over a [`poly::Coeff`] ring;
//! the aliases below fix the concrete rings used throughout.

pub mod arith;
pub mod bvp;
pub mod calculus;
pub mod context;
pub mod error;
pub mod expr;
pub mod harmonic;
pub mod integrate;
pub mod kernels;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod render;
pub mod scalar;
pub mod transforms;

pub use context::{BaseId, Context};
pub use error::{ErrorClass, HftError, Result};
pub use expr::Expr;
pub use poly::{Coeff, Monomial, Polynomial, Var};
pub use scalar::Scalar;

/// Exact rationals.
pub type Rational = num_rational::BigRational;
/// Polynomials with rational coefficients.
pub type QPoly = Polynomial<Rational>;
/// Polynomials with exact scalar coefficients.
pub type Poly = Polynomial<Scalar>;
/// Polynomials with double-precision coefficients, for numerical checks.
pub type FPoly = Polynomial<f64>;
