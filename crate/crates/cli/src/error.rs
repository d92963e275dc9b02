use kolmo_core::Error;
use serde_json::json;

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: unreadable files, malformed JSON, or a construction
    /// rejecting its arguments.
    Validation { kind: String, message: String },
    /// A computed defect exceeded its tolerance.
    Numerical { quantity: String, value: f64, tol: f64 },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn validation(kind: &str, message: impl Into<String>) -> Self {
        Self::Validation {
            kind: kind.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation { .. } => EXIT_VALIDATION,
            Self::Numerical { .. } => EXIT_NUMERICAL,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Self::Validation { kind, message } => json!({"error": kind, "message": message}),
            Self::Numerical { quantity, value, tol } => json!({
                "error": "numerical_failure",
                "message": format!("{quantity} = {value:e} exceeds {tol:e}"),
                "quantity": quantity,
                "value": value,
                "tol": tol,
            }),
        }
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::NotHermitian(_) => "not_hermitian",
        Error::NotPsd(_) => "not_psd",
        Error::NotPositiveDefinite(_) => "not_positive_definite",
        Error::LabelMismatch(_) => "label_mismatch",
        Error::PointMismatch(_) => "point_mismatch",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::Unbounded => "unbounded",
        Error::NotDominated => "not_dominated",
        Error::NotGroupKernel(_) => "not_group_kernel",
        Error::IncompatibleKernel(_) => "incompatible_kernel",
        Error::NonPeriodic(_) => "non_periodic",
        Error::NotInvariant(_) => "not_invariant",
        Error::NotNtf(_) => "not_ntf",
        Error::NotNtfVector(_) => "not_ntf_vector",
        Error::NotQmf => "not_qmf",
        Error::GridMismatch(_) => "grid_mismatch",
        Error::NotHarmonic(_) => "not_harmonic",
        Error::NotNonnegative(_) => "not_nonnegative",
        Error::InvalidCycle(_) => "invalid_cycle",
        Error::NoTrivialCycle => "no_trivial_cycle",
        Error::InvalidInput(_) => "invalid_input",
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::validation(kind(&e), e.to_string())
    }
}

/// Fails with [`CliError::Numerical`] when `value > tol` or `value` is NaN.
pub fn ensure_below(quantity: &str, value: f64, tol: f64) -> CliResult<()> {
    if value <= tol {
        Ok(())
    } else {
        Err(CliError::Numerical {
            quantity: quantity.into(),
            value,
            tol,
        })
    }
}
