use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("generator count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("operator {tag} is singular (condition estimate {cond:.3e}): {detail}")]
    Singular {
        tag: String,
        cond: f64,
        detail: String,
    },

    #[error("truncation overflow: discarded norm {discarded:.3e} ({detail})")]
    Truncation { discarded: f64, detail: String },

    #[error("fixed-point iteration did not converge within {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("incompatible operator composition: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
