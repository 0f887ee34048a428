use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular element (|det| = {det_abs:e})")]
    Singular { det_abs: f64 },
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("branch tracking failed: {0}")]
    Branch(String),
    #[error("kernel singularity: {0}")]
    KernelSingularity(String),
    #[error("point too close to the boundary (condition {cond:e})")]
    NearBoundary { cond: f64 },
    #[error("not implemented for this system: {0}")]
    NotImplemented(String),
    #[error("function is not positive: {0}")]
    NotPositive(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
