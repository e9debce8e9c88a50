use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the estimation library.
///
/// Variants are grouped so the CLI can map them onto exit codes:
/// configuration-type problems exit with 2, numeric failures with 3.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model or noise parameters are inadmissible.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A simulation or study configuration cannot be run as given.
    #[error("configuration error: {0}")]
    Config(String),

    /// A requested window or index lies outside the available data.
    #[error("range error: {0}")]
    Range(String),

    /// A kernel violates the localizing-kernel requirements.
    #[error("kernel error: {0}")]
    Kernel(String),

    /// An estimator could not produce a value for the given data.
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A numerical routine failed (singular resolvent, Riccati divergence, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The Riccati solution has a vanishing innovation variance.
    #[error("degenerate Kalman filter: innovation variance {0:e} is not positive")]
    Degenerate(f64),

    /// The global optimizer found no feasible point.
    #[error("optimization error: {0}")]
    Optimization(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::Parameter(_)
            | Error::Config(_)
            | Error::Range(_)
            | Error::Kernel(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => 2,
            Error::Estimation(_)
            | Error::Numeric(_)
            | Error::Degenerate(_)
            | Error::Optimization(_) => 3,
        }
    }
}
