use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    InvalidInput(String),

    #[error("dimension mismatch in {what}: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        what: String,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("{dir}: frame numbering has a gap, expected {expected:06}.png")]
    SequenceGap { dir: PathBuf, expected: usize },

    #[error("kernel {kernel_w}x{kernel_h} does not fit in {image_w}x{image_h} raster")]
    KernelTooLarge {
        kernel_w: usize,
        kernel_h: usize,
        image_w: usize,
        image_h: usize,
    },

    #[error("phrase {phrase} ({text:?}): {message}")]
    Phrase {
        phrase: usize,
        text: String,
        message: String,
    },

    #[error("phrase {0} has no placement")]
    UnplacedPhrase(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for bad input, 2 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 2,
            _ => 1,
        }
    }
}
