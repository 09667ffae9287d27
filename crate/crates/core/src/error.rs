use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: max |m - m^dagger| = {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("size cap exceeded: {requested} basis elements requested, cap is {cap}")]
    SizeCap { requested: usize, cap: usize },

    #[error("map is not completely positive: eigenvalue {eigenvalue:e} below -{tol:e}")]
    NotCompletelyPositive { eigenvalue: f64, tol: f64 },

    #[error("convention error: {0}")]
    Convention(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ensemble exhausted at realization {realization} after {attempts} draws: {reason}")]
    EnsembleExhausted {
        realization: u64,
        attempts: u64,
        reason: String,
    },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
