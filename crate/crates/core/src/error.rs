use thiserror::Error;

use crate::modulus::MOIndices;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate modulus: {0}")]
    DegenerateModulus(String),

    #[error("invalid promotion: new order {to} is below current order {from}")]
    InvalidPromotion { from: f64, to: f64 },

    #[error("invalid extension: W = {0} must be positive")]
    InvalidExtension(f64),

    /// The index estimates did not settle on the supplied grids. The partial
    /// result is kept so callers can inspect the last estimates.
    #[error("MO index estimates did not converge: {reason}")]
    MoNonConvergence {
        reason: String,
        partial: Box<MOIndices>,
    },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("insufficient decay: {0}")]
    Decay(String),

    #[error("truncation error above tolerance: {0}")]
    Truncation(String),

    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Stable machine-readable prefix used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "E_DOMAIN",
            Error::DegenerateModulus(_) => "E_DEGENERATE_MODULUS",
            Error::InvalidPromotion { .. } => "E_INVALID_PROMOTION",
            Error::InvalidExtension(_) => "E_INVALID_EXTENSION",
            Error::MoNonConvergence { .. } => "E_NONCONVERGENCE",
            Error::Quadrature(_) => "E_QUADRATURE",
            Error::Divergence(_) => "E_DIVERGENCE",
            Error::Decay(_) => "E_DECAY",
            Error::Truncation(_) => "E_TRUNCATION",
            Error::UnsupportedDimension(_) => "E_UNSUPPORTED_DIMENSION",
            Error::Inapplicable(_) => "E_INAPPLICABLE",
            Error::Parameter(_) => "E_PARAMETER",
            Error::Fit(_) => "E_FIT",
            Error::Config { .. } => "E_CONFIG",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_JSON",
        }
    }
}
