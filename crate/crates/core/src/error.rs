use thiserror::Error;

/// Errors raised by the solvers, certificate calculators and the scenario harness.
#[derive(Debug, Error)]
pub enum MixError {
    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("mode k = {k} lies outside the lattice (kmax = {kmax})")]
    ModeOutOfRange { k: i64, kmax: usize },

    #[error("field has nonzero mean coefficient {0}")]
    NonZeroMean(f64),

    #[error("field is identically zero")]
    ZeroField,

    #[error("field is not conjugate-symmetric (defect {0:e})")]
    NotReal(f64),

    #[error("grid {nx}x{ny} is too small for lattice (need at least {min_x}x{min_y})")]
    GridTooSmall {
        nx: usize,
        ny: usize,
        min_x: usize,
        min_y: usize,
    },

    #[error("declared bound {name} = {declared} is exceeded by sampled value {sampled}")]
    BoundViolated {
        name: &'static str,
        declared: f64,
        sampled: f64,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("spectral cluster is not isolated: gap {gap:e} below tolerance {tol:e}")]
    GapTooSmall { gap: f64, tol: f64 },

    #[error("no detecting cluster: every root-space projection of the datum is below threshold")]
    NoDetectingCluster,

    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, MixError>;

impl MixError {
    /// The underlying I/O error kind, including I/O failures inside the CSV writer.
    pub fn io_kind(&self) -> Option<std::io::ErrorKind> {
        match self {
            MixError::Io(e) => Some(e.kind()),
            MixError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(io) => Some(io.kind()),
                _ => None,
            },
            _ => None,
        }
    }
}

pub(crate) fn param(msg: impl Into<String>) -> MixError {
    MixError::Parameter(msg.into())
}

pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> MixError {
    MixError::Schema {
        path: path.into(),
        msg: msg.into(),
    }
}
