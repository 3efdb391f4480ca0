use thiserror::Error;

/// Errors raised by the numerical modules and the run driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("degenerate frequencies: |{omega} - {omega_p}| is below the degeneracy threshold")]
    DegenerateFrequencies { omega: f64, omega_p: f64 },

    #[error("quadrature failed to converge: {0}")]
    Convergence(String),

    #[error("step size {step} exceeds the stability limit {limit}")]
    StepSize { step: f64, limit: f64 },

    #[error("amplitude norm {norm} exceeds 1 at t = {time}")]
    NonUnitary { norm: f64, time: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("picture error: {0}")]
    Picture(String),

    #[error("trajectory grids do not match: {0}")]
    GridMismatch(String),

    #[error("optimum {dt_opt} sits on the search boundary [{lo}, {hi}]")]
    Boundary { dt_opt: f64, lo: f64, hi: f64 },

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    /// Process exit code: 2 for configuration problems, 3 for numerical
    /// failures and everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
