use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("diverged value: {0}")]
    DivergedValue(String),

    /// Iterated stencil coefficients left the representable range.
    #[error("diverged operator: coefficient magnitude {magnitude:e} at power {power}")]
    DivergedOperator { power: usize, magnitude: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    #[error("insufficient scan: k_max {k_max} is below support bound {support_bound}")]
    InsufficientScan { k_max: usize, support_bound: usize },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("internal error: {0}")]
    Internal(String),
}
