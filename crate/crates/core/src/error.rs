use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CauchyError {
    #[error("argument outside the branch domain: {0}")]
    Domain(String),
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("operators live on different grids")]
    GridMismatch,
    #[error("operator is not skew-adjoint (defect {0:.3e})")]
    NotSkewAdjoint(f64),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("field vanishes identically on the sample region")]
    ZeroField,
}

pub type Result<T> = std::result::Result<T, CauchyError>;
