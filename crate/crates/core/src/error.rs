use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("family index N = {0} is outside the supported range [2, {max}]", max = crate::domain::MAX_N)]
    InvalidN(u32),

    #[error("x = {x} lies outside [-1/2, 1/2]")]
    OutOfRange { x: f64 },

    #[error("point ({x}, {y}) is not in the domain for N = {n}")]
    NotInDomain { n: u32, x: f64, y: f64 },

    #[error("evaluation at ({re}, {im}) is within {dist:e} of a pole")]
    Singularity { re: f64, im: f64, dist: f64 },

    #[error(transparent)]
    Quadrature(#[from] crate::quadrature::QuadError),

    #[error("no 4π turn is reached between x = {t} and x = 1/2")]
    TurnUnreachable { t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

impl CoreError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CoreError::Io { path: path.into(), source }
    }
}
