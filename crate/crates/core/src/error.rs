use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The circulant embedding produced a significantly negative eigenvalue.
    #[error("circulant embedding failed: eigenvalue {value:e} at index {index} (max {max:e})")]
    EmbeddingFailure { index: usize, value: f64, max: f64 },

    #[error("covariance matrix is not numerically positive definite (pivot {pivot} = {value:e})")]
    Factorization { pivot: usize, value: f64 },

    #[error("size {requested} exceeds the limit of {limit}")]
    SizeLimit { requested: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("grid spacings are not nested: {0}")]
    NotNested(String),

    #[error("result does not belong to the supplied configuration")]
    ConfigMismatch,

    #[error("spectrum I/O: {0}")]
    Io(String),
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must lie in (0, 2), got {alpha}")))
    }
}
