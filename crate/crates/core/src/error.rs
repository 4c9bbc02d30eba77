use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("survival function increases between t={lo} and t={hi} ({s_lo} < {s_hi})")]
    NonMonotoneTail { lo: f64, hi: f64, s_lo: f64, s_hi: f64 },

    #[error("quadrature on [{a}, {b}] exceeded the budget of {budget} intervals (error estimate {err:e})")]
    QuadratureFailure { a: f64, b: f64, budget: usize, err: f64 },

    #[error("could not bracket the monotone transform at level {level}")]
    InversionFailure { level: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("state space of {states} exceeds the enumeration cap of {cap}")]
    StateSpaceExceeded { states: u128, cap: u128 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
