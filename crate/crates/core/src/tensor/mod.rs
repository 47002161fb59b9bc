//! Dense multilayer-perceptron kernel.
//!
//! Everything here works on row-major `f64` batches: one sample per row.
//! Hidden blocks are `dense -> layer norm -> relu`; the head is a dense layer
//! followed by either `tanh` or the identity. Backpropagation is written out
//! by hand and the optimizer is Adam.

mod adam;
mod checkpoint;
mod gradcheck;
mod layer;
mod mlp;

pub use adam::{AdamConfig, OptimizerState};
pub use gradcheck::{gradcheck, GradcheckReport};
pub use checkpoint::{MlpRecord, OptimizerRecord, ParamRecord};
pub use layer::{norm_forward, DenseLayer, NormLayer, LAYER_NORM_EPSILON};
pub use mlp::{ForwardCache, GradientSet, Mlp, MlpSpec, OutputHead};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("forward cache does not belong to the current network parameters")]
    StaleCache,
    #[error("non-finite value in `{0}`, training has diverged")]
    NonFinite(String),
    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, TensorError>;
