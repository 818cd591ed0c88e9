use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value violates a model invariant.
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The log-normal sum fit did not converge or produced an unusable parameter set.
    #[error("log-normal sum fit failed for (mu={mu_db} dB, sigma={sigma_db} dB, L={branches}): {reason}")]
    FitFailure {
        mu_db: f64,
        sigma_db: f64,
        branches: u32,
        reason: String,
    },

    #[error("unsupported quadrature order {order} (supported: 1..={max})")]
    UnsupportedOrder { order: usize, max: usize },

    /// Fixed-order quadrature and the adaptive cross-check disagree.
    #[error("quadrature order {order} insufficient for {term}: rule gives {rule:.3e}, adaptive gives {adaptive:.3e}")]
    QuadratureInsufficient {
        term: &'static str,
        order: usize,
        rule: f64,
        adaptive: f64,
    },

    #[error("numerical failure in {context}: {reason}")]
    Numerical { context: &'static str, reason: String },

    #[error("simulation needs at least {min} trials, got {trials}")]
    TooFewTrials { trials: u64, min: u64 },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    /// Structurally valid file whose fields do not match the documented schema.
    #[error("schema violation at `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("at grid point {index} ({variable} = {value}): {source}")]
    GridPoint {
        index: usize,
        variable: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("csv output {path}: {message}")]
    Csv { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn numerical(context: &'static str, reason: impl Into<String>) -> Self {
        Error::Numerical {
            context,
            reason: reason.into(),
        }
    }

    /// True for errors caused by user-supplied configuration rather than numerics.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidParameter { .. }
            | Error::ConfigParse { .. }
            | Error::Schema { .. }
            | Error::Io { .. } => true,
            Error::GridPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
