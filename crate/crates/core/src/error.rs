use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mean-field solver found no positive root (residual {0:e})")]
    MeanField(f64),

    #[error("eigenvalue iteration did not converge for a {0}x{0} matrix")]
    EigenNonConvergence(usize),

    #[error("no steady state: spectral abscissa {abscissa:e} is not below -{tolerance:e}")]
    NoSteadyState { abscissa: f64, tolerance: f64 },

    #[error("Lyapunov solve failed: relative residual {residual:e} exceeds {tolerance:e}")]
    SolverFailure { residual: f64, tolerance: f64 },

    #[error("dimension {dim} exceeds the limit {limit} for the vectorized oracle")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("time integration reached t = {time} without converging (last residual {residual:e})")]
    IntegrationTimeout { time: f64, residual: f64 },

    #[error("singular linear system")]
    Singular,

    #[error("unphysical covariance: {0}")]
    Unphysical(String),

    #[error("identical modes requested for a two-mode quantity")]
    IdenticalModes,

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}
