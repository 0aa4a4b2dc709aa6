//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by construction, evaluation and the numerical procedures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent vector: {0}")]
    InvalidExponents(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("point {x} is outside the admissible domain: {reason}")]
    Domain { x: f64, reason: String },

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("determinantal polynomial is identically zero: {0}")]
    DegenerateDeterminant(String),

    #[error("index {index} exceeds the family order {order}")]
    IndexTooLarge { index: usize, order: usize },

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("polynomial is identically zero")]
    IdenticallyZero,

    #[error("polynomial is not strictly positive: f({witness}) = {value}")]
    NotStrictlyPositive { witness: f64, value: f64 },

    #[error("leading coefficient must be positive, got {0}")]
    BadLeadingCoefficient(f64),

    #[error("polynomial is negative for large arguments (leading coefficient {0})")]
    TailNegative(f64),

    #[error("Newton iteration did not converge (residual {residual:e} after {iterations} iterations)")]
    NewtonDivergence {
        last_iterate: Vec<f64>,
        residual: f64,
        iterations: usize,
    },

    #[error("polynomial is negative somewhere: f({witness}) = {value}")]
    NegativeSomewhere { witness: f64, value: f64 },

    #[error("polynomial has {zeros} zeros counting multiplicity, order is {order}")]
    TooManyZeros { zeros: usize, order: usize },

    #[error("exponent {0} of the polynomial has no matching moment")]
    ExponentMismatch(f64),

    #[error("moment sequence is not dense over 0..n")]
    NotDense,

    #[error("moment sequence is infeasible (certificate value {value:e})")]
    Infeasible { value: f64 },

    #[error("atom recovery failed (best residual {residual:e})")]
    RecoveryFailed { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(x: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            x,
            reason: reason.into(),
        }
    }

    /// Short stable identifier, used in machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidExponents(_) => "invalid_exponents",
            Error::InvalidInterval(_) => "invalid_interval",
            Error::Domain { .. } => "domain_error",
            Error::UnsupportedOrder { .. } => "unsupported_order",
            Error::Shape(_) => "shape_error",
            Error::Config(_) => "config_error",
            Error::SingularSystem(_) => "singular_system",
            Error::DegenerateDeterminant(_) => "degenerate_determinant",
            Error::IndexTooLarge { .. } => "index_too_large",
            Error::ConstructionFailed(_) => "construction_failed",
            Error::IdenticallyZero => "identically_zero",
            Error::NotStrictlyPositive { .. } => "not_strictly_positive",
            Error::BadLeadingCoefficient(_) => "bad_leading_coefficient",
            Error::TailNegative(_) => "tail_negative",
            Error::NewtonDivergence { .. } => "newton_divergence",
            Error::NegativeSomewhere { .. } => "negative_somewhere",
            Error::TooManyZeros { .. } => "too_many_zeros",
            Error::ExponentMismatch(_) => "exponent_mismatch",
            Error::NotDense => "not_dense",
            Error::Infeasible { .. } => "infeasible",
            Error::RecoveryFailed { .. } => "recovery_failed",
        }
    }
}
