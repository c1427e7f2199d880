use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// An iterative method did not reach its tolerance within the term budget.
    #[error("{op} did not converge within {budget} terms")]
    Convergence { op: &'static str, budget: usize },

    #[error("overflow in {op}: log-magnitude {log_value} is not representable")]
    Overflow { op: &'static str, log_value: f64 },

    #[error("invalid size for {op}: {detail}")]
    Size { op: &'static str, detail: String },

    /// An integrand returned a non-finite value at a node.
    #[error("non-finite integrand value {value} at node {node}")]
    Evaluation { node: f64, value: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain { op, detail: detail.into() }
    }
}
