use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pole on the evaluation domain at z = {z} (denominator modulus {modulus:e})")]
    PoleOnDomain { z: Complex64, modulus: f64 },

    #[error("rational function has a pole inside the closed unit disk at {root}")]
    PoleInsideDisk { root: Complex64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("numerical breakdown in {what}: {detail}")]
    NumericalBreakdown { what: &'static str, detail: String },

    #[error("invariant violated in {what}: {detail}")]
    InvariantViolation { what: &'static str, detail: String },

    #[error("degenerate design: x-range factor {factor:.3} is below the required {required}")]
    DegenerateDesign { factor: f64, required: f64 },

    #[error("n = {n} is too small: need n > 2N = {two_n}")]
    NTooSmall { n: usize, two_n: usize },

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("sequence has repeated points; distinct points are required")]
    DegenerateSigma,

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn non_convergence(what: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            what,
            detail: detail.into(),
        }
    }

    /// True for failures caused by the numerics rather than by the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NumericalBreakdown { .. }
                | Error::InvariantViolation { .. }
                | Error::PoleOnDomain { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
