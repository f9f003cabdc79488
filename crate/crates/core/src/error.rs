use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),

    #[error("invalid block parameters: {0}")]
    InvalidParams(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("gadget degenerate: |g_x^(a)| = |g_z^(b)| = {0}")]
    GadgetDegenerate(f64),

    #[error("infeasible gadget: {0}")]
    InfeasibleGadget(String),

    #[error("first-order leakage: ||P0 g P0|| = {norm:e}")]
    FirstOrderLeakage { norm: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("numerical failure: {message} (residual estimate {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
