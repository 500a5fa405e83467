use thiserror::Error;

/// Error type shared by all library modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max |M - M'| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NonHermitianInput { deviation: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge in {0} sweeps")]
    EigenConvergence(usize),

    #[error("temperature must be strictly positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("partition function exceeds f64 range (ln Z = {ln_z:.6e})")]
    PartitionOverflow { ln_z: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid bisection bracket: {0}")]
    BracketInvalid(String),

    #[error("unknown figure preset '{0}' (expected fig1..fig6)")]
    UnknownPreset(String),

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
