use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate steady state: generator kernel has dimension {dim}")]
    DegenerateSteadyState { dim: usize },

    #[error("eigendecomposition of the generator did not converge")]
    EigenSolve,

    #[error("time integration unstable (trace drift {drift:.3e}); use a smaller time step")]
    Unstable { drift: f64 },

    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("series outside convergence radius after {terms} terms; use flux_laplace")]
    SeriesDivergent { terms: usize },

    #[error("precision loss: {0}")]
    Precision(String),

    #[error("generating function has a pole at s = {0}")]
    Pole(f64),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
