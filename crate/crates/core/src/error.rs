use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is defective: biorthogonal overlap {overlap:e} at eigenvalue index {index}")]
    DefectiveMatrix { index: usize, overlap: f64 },

    #[error("matrix is singular: pivot magnitude {pivot:e} below threshold {threshold:e}")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("matrix is not Hermitian: defect {defect:e} exceeds {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("spectrum is not real: max |Im λ| = {max_imag:e}")]
    ComplexSpectrum { max_imag: f64 },

    #[error("weight {index} is not positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("spectral path unavailable: spectrum is degenerate or defective")]
    SpectralPathUnavailable,

    #[error("metric solution paths disagree: oracle rank {oracle_rank}, spectral rank {spectral_rank}, span distance {distance:e}")]
    PathMismatch {
        oracle_rank: usize,
        spectral_rank: usize,
        distance: f64,
    },

    #[error("parameter {index} is not Hermitian (defect {defect:e})")]
    NotHermitianParameter { index: usize, defect: f64 },

    #[error("parameter {index} is singular")]
    SingularParameter { index: usize },

    #[error("quasi-Hermiticity violated: residual {residual:e} exceeds {tol:e}")]
    QuasiHermiticityViolation { residual: f64, tol: f64 },

    #[error("operation requires N = {expected}, chain has N = {found}")]
    WrongN { expected: usize, found: usize },

    #[error("state vector is zero")]
    ZeroState,

    #[error("parameter must be nonzero")]
    ZeroParameter,

    #[error("dimension {0} is below the minimum of 2")]
    BadDimension(usize),

    #[error("invalid range [{lo}, {hi}] with {samples} samples")]
    BadRange { lo: f64, hi: f64, samples: usize },

    #[error("invalid input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
