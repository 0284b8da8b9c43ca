use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the mathematical domain was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its requested tolerance.
    /// `residual` carries the best error bound that was achieved.
    #[error("computation error: {message} (residual {residual:.3e})")]
    Computation { message: String, residual: f64 },

    /// The immersion condition (positive definite first fundamental form)
    /// failed at a quadrature node.
    #[error("immersion violated: {0}")]
    Immersion(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown shape '{0}'")]
    UnknownShape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn computation(msg: impl Into<String>, residual: f64) -> Self {
        Error::Computation {
            message: msg.into(),
            residual,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
