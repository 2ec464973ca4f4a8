use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The spec text is not well formed.
    #[error("syntax error at position {position}: {message} (expected {expected})")]
    Syntax {
        position: usize,
        message: String,
        expected: String,
    },

    /// A parameter lies outside its admissible range.
    #[error("domain error: {param} = {value} is outside {admissible}")]
    Domain {
        param: String,
        value: String,
        admissible: String,
    },

    /// The distribution does not offer the requested operation.
    #[error("capability error: {spec} has no {capability}")]
    Capability { spec: String, capability: String },

    /// The law puts positive mass at zero, or a zero was drawn where the law forbids it.
    #[error("admission error: {0}")]
    Admission(String),

    #[error("sample of size {got} is too small (need at least {need})")]
    UndersizedSample { got: usize, need: usize },

    #[error("zero denominator drawn at index {index} (seed {seed}, stream {stream_id})")]
    ZeroDenominator {
        index: usize,
        seed: u64,
        stream_id: u64,
    },

    #[error("zero-denominator cell in the support: {0}")]
    ZeroSupport(String),

    /// Adaptive quadrature hit its refinement limits before meeting the tolerance.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound} > tolerance {tol}")]
    NonConvergence {
        estimate: f64,
        error_bound: f64,
        tol: f64,
    },

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(param: &str, value: impl ToString, admissible: &str) -> Self {
        Error::Domain {
            param: param.to_string(),
            value: value.to_string(),
            admissible: admissible.to_string(),
        }
    }

    pub(crate) fn capability(spec: impl ToString, capability: &str) -> Self {
        Error::Capability {
            spec: spec.to_string(),
            capability: capability.to_string(),
        }
    }
}
