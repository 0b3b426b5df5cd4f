use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("fractional order must be positive, got s = {0}")]
    NonPositiveOrder(f64),

    #[error("embedding requires 2s > d, got d = {d}, s = {s}")]
    EmbeddingHypothesis { d: usize, s: f64 },

    #[error("grid mismatch: expected shape {expected:?} with {expected_m} components, got {found:?} with {found_m}")]
    GridMismatch {
        expected: Vec<usize>,
        expected_m: usize,
        found: Vec<usize>,
        found_m: usize,
    },

    #[error("operation requires {required} mode, domain is in {actual} mode")]
    WrongMode {
        required: &'static str,
        actual: &'static str,
    },

    #[error("invalid potential parameter: {0}")]
    InvalidPotential(String),

    #[error("regularization parameter eps = {eps} outside admissible range {range}")]
    EpsilonOutOfRange { eps: f64, range: &'static str },

    #[error("invalid simulation configuration: {0}")]
    InvalidConfig(String),

    #[error("time step {dt} exceeds stability bound {bound}")]
    Unstable { dt: f64, bound: f64 },

    #[error("non-finite values at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },

    #[error("test function is not supported in the domain: {0} exterior values are nonzero")]
    TestFunctionSupport(usize),

    #[error("quadrature did not reach tolerance {tol}: estimated error {estimate}")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("family not certified: {0}")]
    Uncertified(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
