use thiserror::Error;

/// Errors raised by the algebraic kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable `{name}` has weight {left} in one operand and {right} in the other")]
    WeightMismatch { name: String, left: u32, right: u32 },
    #[error("substituted series has a nonzero constant term")]
    NonzeroConstant,
    #[error("substituted series for `{name}` has valuation {valuation}, below the variable weight {weight}")]
    LowValuation {
        name: String,
        valuation: u32,
        weight: u32,
    },
    #[error("operation needs a univariate series, found {0} variables")]
    NotUnivariate(usize),
    #[error("linear coefficient must be exactly 1 for reversion")]
    NotReversible,
    #[error("constant term must be 1, found {0}")]
    BadConstantTerm(String),
    #[error("series is not invertible (constant term is not a nonzero rational)")]
    NotInvertible,
    #[error("exact division failed: nonzero remainder at weight {weight}")]
    NotDivisible { weight: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("product decomposition left a nonzero residual for s_{a} * s_{b}")]
    DecompositionResidual { a: String, b: String },
    #[error("weight {requested} exceeds the available data (max {available})")]
    WeightOutOfRange { requested: u32, available: u32 },
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("x^{power} cannot be written in terms of u = x·ι(x)")]
    Irreducible { power: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = AlgebraError> = std::result::Result<T, E>;
