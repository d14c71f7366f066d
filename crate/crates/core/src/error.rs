use alloc::string::String;
use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("map is identically zero")]
    IdenticallyZero,
    #[error("0/0 while evaluating a rational map at {re} + {im}i")]
    Indeterminate { re: f64, im: f64 },
    #[error("root finder did not converge (max backward error {max_residual:e})")]
    RootsNotConverged { max_residual: f64 },
    #[error("degenerate Moebius map (determinant {det:e})")]
    DegenerateMoebius { det: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature budget exceeded: partial value {value}, estimated error {error:e}")]
    BudgetExceeded { value: f64, error: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("expression error at byte {position}: {message}")]
    Expression { position: usize, message: String },
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("limit did not converge: {0}")]
    NotQuasinormal(String),
    #[error("mass quantization failed: estimate {estimate}, nearest D = {degree}, residual {residual}")]
    Quantization { estimate: f64, degree: i64, residual: f64 },
    #[error("probe ball margin {margin} below minimum {minimum}")]
    ProbeMargin { margin: f64, minimum: f64 },
    #[error("continuation failed: {0}")]
    Continuation(String),
    #[error("expected {expected} roots, found {found}")]
    RootCount { expected: usize, found: usize },
    #[error("rational fit failed: {0}")]
    Fit(String),
    #[error("inconsistent descendant order: {0}")]
    Order(String),
    #[error("attachment point did not stabilize (spread {spread:e})")]
    Attachment { spread: f64 },
    #[error("node continuity gap {gap:e} above tolerance")]
    NodeContinuity { gap: f64 },
    #[error("admissibility violated: energy {energy} exceeds {limit}")]
    Admissibility { energy: f64, limit: f64 },
    #[error("unbounded domain")]
    UnboundedDomain,
}

pub type Result<T> = core::result::Result<T, Error>;
