use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parameter domain: {0}")]
    ParameterDomain(String),

    #[error("model {0} has no radial profile")]
    UnsupportedModel(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("no convergence: {message} (residual {residual:e})")]
    NonConvergence { message: String, residual: f64 },

    #[error("grid point {index}: {source}")]
    GridPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Degenerate(_) => "degenerate",
            Error::ParameterDomain(_) => "parameter_domain",
            Error::UnsupportedModel(_) => "unsupported_model",
            Error::Singular(_) => "singular",
            Error::NonConvergence { .. } => "non_convergence",
            Error::GridPoint { .. } => "grid_point",
            Error::Invalid(_) => "invalid",
        }
    }
}
