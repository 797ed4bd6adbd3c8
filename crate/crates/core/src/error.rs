use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{format} parse error{}: {message}", location.as_deref().map(|l| format!(" at {l}")).unwrap_or_default())]
    Parse {
        format: &'static str,
        location: Option<String>,
        message: String,
    },

    #[error("unknown relation label `{0}` and no fallback rule in the mapping table")]
    UnknownLabel(String),

    #[error("invalid dependency graph for {doc_id}: {message}")]
    InvalidGraph { doc_id: String, message: String },

    #[error("invalid tree for {doc_id}: {message}")]
    InvalidTree { doc_id: String, message: String },

    #[error("segmentation mismatch for {doc_id}: {message}")]
    SegmentationMismatch { doc_id: String, message: String },

    #[error("annotation error in {doc_id}: {message}")]
    Annotation { doc_id: String, message: String },

    #[error("empty vocabulary source: {0}")]
    EmptyVocabulary(String),

    #[error("missing syntax layer for document {0}")]
    MissingSyntax(String),

    #[error("missing join key: {0}")]
    MissingKey(String),

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("rank-deficient design: {0}")]
    RankDeficient(String),

    #[error("optimizer did not converge after {iterations} iterations (max |score| = {max_score:e})")]
    NonConvergence { iterations: usize, max_score: f64 },

    #[error("models are not nested: {0}")]
    NotNested(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(format: &'static str, location: Option<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            format,
            location,
            message: message.into(),
        }
    }
}
