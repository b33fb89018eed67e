use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the unit cell [-1/2, 1/2)^2")]
    PointOutOfCell { x: f64, y: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid connection model: {0}")]
    Model(String),

    #[error("integral of the connection function diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not converge: estimate {value:e} with error estimate {abs_error:e}")]
    Quadrature { value: f64, abs_error: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
