//! Learning primitives with hand-written gradients: dense, LSTM and attention
//! layers, weighted BCE, SGD/Adam, CART trees, random forests and a set of
//! classic classifiers.

pub mod attention;
pub mod checkpoint;
pub mod classic;
pub mod encoder;
pub mod error;
pub mod gradcheck;
pub mod layers;
pub mod loss;
pub mod lstm;
pub mod net;
pub mod normalize;
pub mod optim;
pub mod params;
pub mod train;
pub mod tree;

pub use attention::Attention;
pub use checkpoint::{Checkpoint, SCHEMA_VERSION};
pub use classic::{ClassicClassifier, ClassicConfig, ClassicKind};
pub use encoder::{EncoderConfig, EncoderOutput, SequenceEncoder};
pub use error::{LearnError, Result};
pub use layers::{Activation, Dense};
pub use loss::ClassWeights;
pub use lstm::{Lstm, LstmLayer};
pub use net::BinaryNet;
pub use normalize::ZScore;
pub use optim::{OptimizerConfig, OptimizerKind};
pub use params::Params;
pub use train::{train_binary, train_binary_observed, BinaryModel, LossHistory, TrainConfig};
pub use tree::{DecisionTree, Forest, ForestConfig, MaxFeatures, TreeConfig};
