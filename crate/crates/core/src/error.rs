use thiserror::Error;

/// Coarse classification of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Unsupported,
    Solvability,
    Infeasible,
    Internal,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Parse => 2,
            ErrorClass::Unsupported => 3,
            ErrorClass::Solvability => 4,
            ErrorClass::Infeasible => 5,
            ErrorClass::Internal => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HftError {
    #[error("parse error at line {line}, column {column}: expected {}, found {found}", expected.join(" or "))]
    Parse { line: usize, column: usize, expected: Vec<String>, found: String },
    #[error("unknown variable `{name}` at line {line}, column {column}")]
    UnknownVariable { name: String, line: usize, column: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("square root of a multi-term scalar")]
    MultiTermSqrt,
    #[error("square root of an odd power of pi^(1/2)")]
    OddPiExponent,
    #[error("square root of a negative scalar")]
    NegativeRadicand,
    #[error("square root of a scalar containing a radical or logarithm")]
    IrreducibleRoot,
    #[error("scalar is not invertible: {0}")]
    NonInvertibleScalar(String),

    #[error("odd power of the norm at an irrational radius")]
    OddPowerIrrationalRadius,
    #[error("negative base value under an odd half-power or logarithm")]
    NegativeBaseValue,
    #[error("zero base value under a negative power or logarithm")]
    ZeroBaseValue,
    #[error("unsupported base: {0}")]
    UnsupportedBase(String),
    #[error("expression is not invertible: {0}")]
    NonInvertibleExpr(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gradient of the defining polynomial vanishes identically")]
    ZeroGradientField,
    #[error("input is not a polynomial")]
    NonPolynomialInput,
    #[error("input is not harmonic")]
    NotHarmonic,

    #[error("radial integral diverges at the origin")]
    DivergentRadialIntegral,
    #[error("unsupported radial class: {0}")]
    UnsupportedRadialClass(String),
    #[error("quadratic region has empty interior")]
    EmptyInterior,
    #[error("ellipsoid axis coefficient is not positive")]
    NonPositiveAxis,

    #[error("inner-product norm is not a perfect-square scalar: {0}")]
    UnsupportedScalarNorm(String),

    #[error("unsupported dimension {0} for this problem")]
    UnsupportedDimension(usize),
    #[error("no polynomial solution within the degree cap")]
    InfeasibleQuadratic,
    #[error("singular linear system")]
    SingularLinearSystem,
    #[error("solvability condition violated: {0}")]
    SolvabilityViolation(String),
    #[error("linear system infeasible within the degree cap")]
    InfeasibleSystem,

    #[error("point coincides with the reflection center")]
    CenterSingularity,

    #[error("internal invariant failure: {0}")]
    Internal(String),
}

impl HftError {
    pub fn class(&self) -> ErrorClass {
        use HftError::*;
        match self {
            Parse { .. } | UnknownVariable { .. } | InvalidArgument(_) => ErrorClass::Parse,
            SolvabilityViolation(_) => ErrorClass::Solvability,
            InfeasibleQuadratic | SingularLinearSystem | InfeasibleSystem => ErrorClass::Infeasible,
            Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Unsupported,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }
}

pub type Result<T> = std::result::Result<T, HftError>;
