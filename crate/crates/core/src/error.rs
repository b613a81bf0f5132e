use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BohrError {
    /// A parameter lies outside the domain where the operation is defined.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// An input sequence is shorter than the requested order.
    #[error("truncation: need order {needed}, input has order {available}")]
    Truncation { needed: usize, available: usize },

    /// The requested accuracy is not reachable within the term budget.
    #[error("truncation failure: tail bound {tail:e} exceeds eps {eps:e} at order {order}")]
    TruncationFailure { order: usize, tail: f64, eps: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: error estimate {estimate:e} after {panels} panels")]
    QuadratureNonConvergence { estimate: f64, panels: usize },

    /// The radius equation shows no sign change on the scan grid.
    #[error("no sign change found for {0}")]
    NoSignChange(String),

    /// No extremal parameter produced a violation above the radius.
    #[error("no violation witness found after {scanned} steps")]
    NoWitness { scanned: usize },
}

impl BohrError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        BohrError::ParameterDomain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, BohrError>;
