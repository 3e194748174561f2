use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sampling failed at node {index} (x = {x}): {reason}")]
    Sampling { index: usize, x: f64, reason: String },
    #[error("capability error: {0}")]
    Capability(String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("strip error at {endpoint}: {detail}")]
    Strip { endpoint: &'static str, detail: String },
    #[error("pole at s = {0}")]
    Pole(String),
    #[error("singular adjoint: {0}")]
    SingularAdjoint(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("contour error: {0}")]
    Contour(String),
    #[error("accuracy envelope exceeded: {0}")]
    Envelope(String),
    #[error("hypothesis error: {0}")]
    Hypothesis(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ZError>;
