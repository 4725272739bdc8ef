use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 2 or 3, got {0}")]
    BadDimension(usize),

    #[error("resolution must be a power of two >= 8, got {0}")]
    BadResolution(usize),

    #[error("box length must be positive and finite, got {0}")]
    BadBoxLength(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("sample buffer has length {got}, grid has {need} points")]
    SizeMismatch { got: usize, need: usize },

    #[error("{op}: occupied mode index {index} exceeds band limit {limit}")]
    BandLimit {
        op: &'static str,
        index: i64,
        limit: i64,
    },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("initial data is not divergence free (relative spectral divergence {0:e})")]
    NotDivergenceFree(f64),

    #[error("norm blow-up at t = {t:.6e}: ||u||_2 = {norm:.6e} exceeds {limit:.6e}")]
    BlowUp { t: f64, norm: f64, limit: f64 },

    #[error(
        "no convergence after {iterations} iterations (last update {last_update:.3e}, tol {tol:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        last_update: f64,
        tol: f64,
    },

    #[error("kernel mass {0:.6} >= 1: iteration is not a contraction")]
    NotContractive(f64),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("duplicate config key '{key}' on lines {first} and {second}")]
    DuplicateKey {
        key: String,
        first: usize,
        second: usize,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
