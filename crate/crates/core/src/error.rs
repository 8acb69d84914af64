use thiserror::Error;

/// Errors produced by the numerical modules and the command-line driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval set: {0}")]
    InvalidSet(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge (residual {residual:.3e})")]
    Convergence { what: String, residual: f64 },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("inadmissible preimage spec: {0}")]
    Inadmissible(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
