use thiserror::Error;

use crate::geom::Vec2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid terrain: {0}")]
    InvalidTerrain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("gradient undefined at ({}, {}): point coincides with a source", .0.x, .0.y)]
    DegeneratePoint(Vec2),

    #[error("circumnavigation requires a sensed gradient direction")]
    MissingGradient,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no terrain with minimum path width {width} found after {attempts} candidates")]
    BinUnreachable { width: f64, attempts: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
