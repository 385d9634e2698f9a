use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("no convergence up to {max_intervals} intervals (best estimates {best:?})")]
    Convergence {
        max_intervals: usize,
        best: Vec<f64>,
    },

    #[error(
        "indeterminate sign: eigenvalue {eigenvalue:e} +/- {estimate:e} straddles the zero band +/-{zero_tol:e}"
    )]
    Indeterminate {
        eigenvalue: f64,
        estimate: f64,
        zero_tol: f64,
    },

    #[error("verification failure in {what}: closed form {closed}, numeric {numeric}")]
    Verification {
        what: String,
        closed: i64,
        numeric: i64,
    },

    #[error("hypothesis violated at t = {at}: {detail}")]
    Hypothesis { at: f64, detail: String },

    #[error("step size underflow at t = {t}")]
    Stiffness { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
