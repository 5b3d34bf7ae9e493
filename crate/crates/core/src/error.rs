use thiserror::Error;

use crate::model::SiteIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// γ = 0 makes the λ quadratic linear; the second root has escaped to infinity.
    #[error("degenerate limit: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("expansion invalid: {0}")]
    ExpansionInvalid(String),

    /// Conflicting spectral indicators. Carries the raw spectrum as (Re z, Im z, Im k).
    #[error("ambiguous region classification: {detail}")]
    Ambiguous {
        detail: String,
        spectrum: Vec<(f64, f64, f64)>,
    },

    #[error(
        "n_cells = {n_cells} lets reflections reach the probed sites before t_max; need at least {required}"
    )]
    Reflection { n_cells: usize, required: usize },

    #[error(
        "step control failed: halving h = {step:e} still changes P by {change:e} (tol {tol:e})"
    )]
    StepControl { step: f64, change: f64, tol: f64 },

    #[error("site {0} was not recorded in this trace")]
    Lookup(SiteIndex),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
