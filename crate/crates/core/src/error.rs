use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate direction: support direction has zero norm")]
    DegenerateDirection,

    #[error("vertex hint {hint} out of range for mesh with {len} vertices")]
    HintOutOfRange { hint: usize, len: usize },

    #[error("mesh has no vertices")]
    EmptyMesh,

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid pose: {0}")]
    InvalidPose(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("simplex degeneracy: no candidate face survived the projection")]
    SimplexDegeneracy,

    #[error("convex hull failure: {0}")]
    Hull(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("suite generation failed: {0}")]
    Generation(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
