use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReplayError {
    /// Missing field, wrong type or malformed JSON.
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    /// Well-formed JSON that violates a record invariant.
    #[error("consistency error at `{path}`: {message}")]
    Consistency { path: String, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ReplayError {
    pub(crate) fn consistency(path: impl Into<String>, message: impl Into<String>) -> Self {
        ReplayError::Consistency {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        ReplayError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Dotted path of the offending field, when the error has one.
    pub fn path(&self) -> Option<&str> {
        match self {
            ReplayError::Schema { path, .. } | ReplayError::Consistency { path, .. } => Some(path),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, ReplayError>;
