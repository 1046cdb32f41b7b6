use thiserror::Error;

/// Errors raised by the transducer and capacity routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid transducer parameters: {0}")]
    InvalidParams(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("susceptibility evaluated at its pole (omega + detuning = 0 with zero damping)")]
    Pole,

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("ill-conditioned derivative test: {0}")]
    Conditioning(String),

    #[error("invalid search space: {0}")]
    InvalidSearch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
