use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed image: {reason}")]
    Image { path: PathBuf, reason: String },

    #[error("no silhouette: frame has no foreground pixels")]
    EmptyFrame,

    #[error("frame {index} has no foreground pixels after cropping")]
    EmptyFrameInStack { index: usize },

    #[error("need at least 2 frames to stack, got {0}")]
    TooFewFrames(usize),

    #[error("crop fraction must lie in (0, 1], got {0}")]
    BadFraction(f64),

    #[error("no volume; silhouette too thin (no cube has all 8 corners in the foreground)")]
    NoVolume,

    #[error("unknown simplex {0:?}")]
    UnknownSimplex(Vec<u32>),

    #[error("filtration is not monotone: {0}")]
    NonMonotone(String),

    #[error("bar birth {birth} lies outside [0, {k}]")]
    BirthOutOfRange { birth: f64, k: f64 },

    #[error("invalid plane `{id}`: {reason}")]
    BadPlane { id: String, reason: String },

    #[error("signature configurations differ: {0}")]
    ConfigMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: parse error: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("empty gallery")]
    EmptyGallery,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
