use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bracketed middle-state solve exhausted its iteration budget.
    #[error("Riemann solver did not converge; bracket [{lo:e}, {hi:e}]")]
    RiemannNonConvergence { lo: f64, hi: f64 },

    /// An implicit jump solve failed. `last` is the final iterate.
    #[error("Newton iteration failed in {context}: residual {residual:e} after {iterations} iterations")]
    Newton {
        context: &'static str,
        residual: f64,
        iterations: usize,
        last: Vec<f64>,
    },

    /// A cell could not be built; the step is aborted.
    #[error("cell construction failed at j={j}, step {step}: {reason}")]
    Construction { j: i64, step: usize, reason: String },

    /// The nozzle profile does not satisfy the admissibility condition.
    #[error("admissibility condition violated: {0}")]
    Admissibility(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
