use thiserror::Error;

/// Errors raised by the solvers and the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the formula it feeds.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario or bath/solver pairing that cannot be run.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The adaptive integrator could not meet its tolerance.
    #[error("step size underflow at t = {t}: tolerance unreachable")]
    StepSize { t: f64 },

    /// The truncated number basis no longer represents the state.
    #[error("truncation failure: {0}")]
    Truncation(String),

    /// A Gaussian branch whose variance parameter has collapsed.
    #[error("degenerate variance: Re V = {0}")]
    DegenerateVariance(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Process exit status used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::StepSize { .. } | Error::Truncation(_) | Error::DegenerateVariance(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
