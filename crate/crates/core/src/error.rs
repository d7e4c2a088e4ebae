use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: cannot decode image: {message}", path.display())]
    Image { path: PathBuf, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("frame directory {} does not exist", .0.display())]
    MissingFrameDir(PathBuf),

    #[error("need at least 2 frames, found {found}")]
    InsufficientFrames { found: usize },

    #[error("empty raster")]
    EmptyRaster,

    #[error("document {0:?} has no text")]
    EmptyDocument(String),

    #[error("similarity undefined for two empty vectors")]
    UndefinedSimilarity,

    #[error("all-zero matrix cannot be decomposed")]
    DegenerateMatrix,

    #[error("corpus has no terms")]
    EmptyVocabulary,

    #[error("query has no terms")]
    EmptyQuery,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("cannot rank scores from different algorithms ({0} and {1})")]
    MixedAlgorithms(String, String),

    #[error("no relevance judgment for screencast {0:?}")]
    MissingJudgment(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of the environment (files, decoding) rather than of
    /// the inputs' content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Image { .. })
    }
}
