use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no real-axis closed form for the {0} model")]
    NoRealAxisForm(&'static str),

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("invalid optical table: {0}")]
    InvalidTable(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("{what} did not converge: estimated error {error:.3e} exceeds target {target:.3e}")]
    NonConvergence { what: String, error: f64, target: f64 },

    #[error("validity range exceeded: {0}")]
    OutOfValidity(String),

    #[error("surfaces in contact: local separation {separation:.3e} m at levels ({i}, {j})")]
    SurfacesInContact { separation: f64, i: usize, j: usize },

    #[error("invalid roughness profile: {0}")]
    Roughness(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    #[error("invalid scenario config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
