use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: a truncated mode needs at least 2 levels, got {0}")]
    InvalidDimension(usize),

    #[error("invalid embedding: slot {slot} has dimension {expected}, operator has {found}")]
    InvalidEmbedding {
        slot: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid slot {slot} for a layout with {slots} subsystems")]
    InvalidSlot { slot: usize, slots: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |A - A^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("numerical defect: {0}")]
    NumericalDefect(String),

    #[error("integration failed at t = {time} (step {step:e} below minimum)")]
    IntegrationFailure { time: f64, step: f64 },

    #[error("quadrature did not converge (estimated error {estimate:e}, target {target:e})")]
    Quadrature { estimate: f64, target: f64 },

    #[error("unsupported modulation profile: {0}")]
    UnsupportedProfile(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
