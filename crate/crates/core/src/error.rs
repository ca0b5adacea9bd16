use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("degenerate class: {0}")]
    DegenerateClass(String),
    #[error("model is not trained")]
    UntrainedModel,
    #[error("no candidate reaches recall {recall}")]
    InfeasibleConstraint { recall: f64 },
    #[error("weights not on the simplex: {0}")]
    SimplexViolation(String),
    #[error("missing embedding: {0}")]
    MissingEmbedding(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error at {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Learn(#[from] hawk_learn::LearnError),
    #[error(transparent)]
    Features(#[from] hawk_features::FeatureError),
    #[error(transparent)]
    Replay(#[from] hawk_replay::ReplayError),
}

impl CoreError {
    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CoreError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// True for errors caused by bad input or configuration rather than a
    /// failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            CoreError::DegenerateClass(_)
                | CoreError::InfeasibleConstraint { .. }
                | CoreError::SimplexViolation(_)
                | CoreError::InsufficientData(_)
                | CoreError::Config(_)
        ) || matches!(self, CoreError::Replay(e) if !matches!(e, hawk_replay::ReplayError::Io { .. }))
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
