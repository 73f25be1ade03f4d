use thiserror::Error;

/// Errors raised by the metric, integrand, transform and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (zero vector,
    /// singular ratio, inadmissible parameter).
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature node produced a non-finite integrand value.
    #[error("singular integrand: {0}")]
    IntegrandSingular(String),

    #[error("not a Finsler metric: {0}")]
    NotFinsler(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Verdicts of a threshold scan changed sign more than once.
    #[error("scan inconsistent: verdicts are not monotone in |b| ({0} sign changes)")]
    ScanInconsistent(usize, Box<crate::gacheck::ThresholdResult>),

    #[error("mesh degenerate at triangle {triangle}")]
    MeshDegenerate { triangle: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn singular(msg: impl Into<String>) -> Self {
        Error::IntegrandSingular(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
