use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty domain")]
    EmptyDomain,
    #[error("malformed domain {0:?}")]
    MalformedDomain(String),

    #[error("no edges survive normalization")]
    NoEdges,
    #[error("invalid edge record: {0}")]
    InvalidEdge(String),
    #[error("unknown source {0}")]
    UnknownSource(String),
    #[error("{}line {line}: {message}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("unknown label {label:?} for domain {domain} (row {row})")]
    UnknownLabel {
        row: usize,
        domain: String,
        label: String,
    },
    #[error("domain {domain} has conflicting labels {first} and {second}")]
    DuplicateDomain {
        domain: String,
        first: String,
        second: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("solver diverged after {iterations} iterations (sup-norm {norm:e})")]
    Diverged { iterations: usize, norm: f64 },
    #[error("non-finite score encountered")]
    NonFinite,
    #[error("linear system is singular")]
    Singular,
    #[error("{nodes} nodes exceeds the dense solver limit of {limit}")]
    TooLarge { nodes: usize, limit: usize },

    #[error("dev set is empty")]
    EmptyDevSet,
    #[error("class {class} has {count} members, fewer than k={k}")]
    TooFewSamples { class: String, count: usize, k: usize },
    #[error("length mismatch: {pred} predictions vs {gold} gold labels")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("empty input")]
    Empty,

    #[error("missing score for node {0}")]
    MissingScore(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn with_path(self, p: &std::path::Path) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                path: Some(p.to_path_buf()),
                line,
                message,
            },
            other => other,
        }
    }

    /// True for numerical solver failures, as opposed to bad input data.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::Diverged { .. } | Error::NonFinite | Error::Singular
        )
    }
}
