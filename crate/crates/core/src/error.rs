use std::path::PathBuf;

use thiserror::Error;

/// A defect in a single image/mask pair found during corpus ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDefect {
    pub id: String,
    pub kind: DefectKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefectKind {
    MissingMask,
    NonBinaryMask { value: u8 },
    ShapeMismatch { image: (u32, u32), mask: (u32, u32) },
    Unreadable(String),
}

impl std::fmt::Display for PairDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            DefectKind::MissingMask => write!(f, "{}: missing mask", self.id),
            DefectKind::NonBinaryMask { value } => {
                write!(f, "{}: non-binary mask (found value {value})", self.id)
            }
            DefectKind::ShapeMismatch { image, mask } => write!(
                f,
                "{}: shape mismatch (image {}x{}, mask {}x{})",
                self.id, image.0, image.1, mask.0, mask.1
            ),
            DefectKind::Unreadable(msg) => write!(f, "{}: unreadable ({msg})", self.id),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no lesion placement found after {attempts} attempts (radius range too large for phantom)")]
    GeometryInfeasible { attempts: usize },

    #[error("image grid exceeds the imaged region: {0}")]
    GridOutOfBounds(String),

    #[error("empty input")]
    EmptyInput,

    #[error("pad of {pad} pixels requires an image larger than {pad} in both dimensions, got {h}x{w}")]
    PadTooLarge { pad: usize, h: usize, w: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("k = {k} folds requested but the pool only has {pool} entries")]
    KTooLarge { k: usize, pool: usize },

    #[error("cannot subsample {n} entries from a training split of {available}")]
    NTooLarge { n: usize, available: usize },

    #[error("{} malformed pair(s) in corpus:\n{}", .0.len(), .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Ingest(Vec<PairDefect>),

    #[error("malformed RF dump: {0}")]
    RfDump(String),

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

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
