use thiserror::Error;

/// Errors raised by field evaluation, residual checks and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative mode error: {0}")]
    MissingDerivative(&'static str),

    #[error("ill-conditioned problem: {0}")]
    IllConditioned(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("iterate left the positive cone at iteration {iteration} (min value {min_value:.3e})")]
    Positivity { iteration: usize, min_value: f64 },

    #[error("continuation failed at the first step: {0}")]
    Branch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
