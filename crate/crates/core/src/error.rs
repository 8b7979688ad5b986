use std::path::PathBuf;

/// Errors surfaced by the library and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),

    /// A configuration value violates an invariant. `field` names the offending entry.
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("action {action:?} is not legal from cell {cell}")]
    IllegalAction {
        action: crate::scene::Action,
        cell: usize,
    },

    #[error("no legal action from cell {0}")]
    Boxed(usize),

    #[error("unknown trajectory `{0}`")]
    UnknownTrajectory(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by the environment.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Invalid { .. }
                | Error::Domain(_)
                | Error::ShapeMismatch { .. }
                | Error::IllegalAction { .. }
                | Error::Boxed(_)
                | Error::UnknownTrajectory(_)
        )
    }

    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
