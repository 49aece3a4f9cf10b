use thiserror::Error;

/// Errors raised by the simulator. Every variant maps onto a stable
/// machine-readable category (see [`Error::category`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode index {index} out of range for a {n_modes}-mode state")]
    InvalidMode { index: usize, n_modes: usize },

    #[error("operation needs two distinct modes, got {0} twice")]
    RepeatedMode(usize),

    #[error("{name} = {value} is outside the allowed range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("covariance matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("state violates the uncertainty principle (min symplectic eigenvalue {0:.12})")]
    Unphysical(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("expected a {expected}-mode state, got {actual} modes")]
    ModeCount { expected: usize, actual: usize },

    #[error("no root of {0} in the search bracket")]
    NoRoot(&'static str),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("optimizer did not converge after {0} evaluations")]
    NotConverged(usize),

    #[error("{0} lies outside the validity range of the model")]
    ModelDomain(String),
}

impl Error {
    /// Short, stable identifier used by the command-line harness.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidMode { .. } | Error::RepeatedMode(_) | Error::ModeCount { .. } => "mode",
            Error::OutOfRange { .. } => "range",
            Error::NotSymmetric(_)
            | Error::NotPositiveDefinite
            | Error::Unphysical(_)
            | Error::Dimension(_) => "state",
            Error::NoRoot(_) | Error::NotConverged(_) => "numerics",
            Error::DegenerateData(_) => "data",
            Error::ModelDomain(_) => "domain",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    range: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
