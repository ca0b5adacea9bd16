use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LearnError {
    #[error("empty input sequence")]
    EmptySequence,
    #[error("non-finite loss in epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("model used before training")]
    UntrainedModel,
    #[error("covariance matrix of class {class} is singular")]
    SingularCovariance { class: usize },
    #[error("degenerate class: {0}")]
    DegenerateClass(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, LearnError>;
