use hawk_replay::SteamId;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("player {0} does not participate in the match")]
    UnknownPlayer(SteamId),
    #[error("degenerate class: {0}")]
    DegenerateClass(String),
    #[error("length mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, FeatureError>;
