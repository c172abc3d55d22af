use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(String),

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown preset `{0}` (expected one of gaas-dots, si-dots, si-donors)")]
    UnknownPreset(String),

    #[error("unknown coupling channel `{0}`")]
    UnknownChannel(String),

    #[error("material `{0}` has no piezoelectric modulus")]
    MissingPiezoModulus(String),

    #[error("channel {channel} requires {required} confinement, geometry is {found}")]
    ShapeMismatch {
        channel: String,
        required: String,
        found: String,
    },

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: String, found: String },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("operator is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {value:e}, error estimate {error_estimate:e})"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("config error{}: {message}", location(.line, .key))]
    Config {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

fn location(line: &Option<usize>, key: &Option<String>) -> String {
    match (line, key) {
        (Some(l), Some(k)) => format!(" at line {l} (key `{k}`)"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(k)) => format!(" (key `{k}`)"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub fn is_nonconvergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub(crate) fn ensure_positive(value: f64, what: &str) -> Result<f64> {
    ensure_finite(value, what)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(what, format!("must be > 0, got {value}")))
    }
}

pub(crate) fn ensure_nonnegative(value: f64, what: &str) -> Result<f64> {
    ensure_finite(value, what)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(what, format!("must be >= 0, got {value}")))
    }
}
