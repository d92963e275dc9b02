use thiserror::Error;

/// Errors raised by the constructions in this crate.
///
/// Variants carry a short human-readable detail; the CLI maps them onto
/// machine-readable error objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("kernel is not positive definite (min eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("point labels do not match: {0}")]
    LabelMismatch(String),
    #[error("point sets do not match: {0}")]
    PointMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bi-kernel is not bounded by the given kernels")]
    Unbounded,
    #[error("kernel is not dominated by the reference kernel")]
    NotDominated,
    #[error("kernel is not invariant under the group: {0}")]
    NotGroupKernel(String),
    #[error("kernel does not satisfy the Gabor covariance relations: {0}")]
    IncompatibleKernel(String),
    #[error("lambda is not a root of unity of order <= {0}")]
    NonPeriodic(usize),
    #[error("bi-kernel is not invariant: {0}")]
    NotInvariant(String),
    #[error("kernel is not a normalized tight frame kernel (idempotency defect {0:.3e})")]
    NotNtf(f64),
    #[error("orbit of the vector is not a normalized tight frame (idempotency defect {0:.3e})")]
    NotNtfVector(f64),
    #[error("filter is not a quadrature mirror filter")]
    NotQmf,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("function is not a fixed point of the transfer operator (defect {0:.3e})")]
    NotHarmonic(f64),
    #[error("function takes negative values (min {0:.3e})")]
    NotNonnegative(f64),
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
    #[error("no trivial cycle among the m0-cycles")]
    NoTrivialCycle,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
