use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not PSD (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step size underflow at t = {t} µs")]
    StepUnderflow { t: f64 },
    #[error("integration exceeded {steps} steps at t = {t} µs")]
    TooManySteps { steps: usize, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
