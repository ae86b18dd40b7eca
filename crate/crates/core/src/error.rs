//! Crate-wide error type. The CLI maps the variants onto distinct exit
//! codes (parse / domain / numerical).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a physical or mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A species registry file failed to parse or validate.
    #[error("species file error: {0}")]
    Species(String),

    /// The momentum grid cannot hold the evolving distribution.
    #[error(
        "momentum grid too narrow: boundary density {boundary_fraction:.3e} of peak \
         exceeds 1e-12; extend the grid to at least |p_max| = {required_p_max:.6e}"
    )]
    GridTooNarrow {
        boundary_fraction: f64,
        required_p_max: f64,
    },

    /// A stochastic trajectory produced a non-finite momentum.
    #[error("non-finite momentum in trajectory {trajectory} at step {step}")]
    NonFiniteTrajectory { trajectory: usize, step: usize },

    /// Numerical failure outside the domain/parse categories.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
