//! Replay data model, ingestion, synthetic generation and dataset splitting.

pub mod error;
pub mod io;
pub mod model;
pub mod parse;
pub mod split;
pub mod synth;

pub use error::{ReplayError, Result};
pub use model::*;
pub use parse::{labels_to_json, match_to_json, parse_labels_json, parse_match_json};
pub use split::{split_dataset, split_indices, Split, SplitIndices, SplitRatios};
pub use synth::{
    generate_corpus, generate_corpus_match, generate_synthetic_match, generate_with_config, BehaviorOverrides,
    CheatProfile, CorpusSpec, ProfileKind, ProfileShift, SynthConfig,
};
