//! Coordinate-based MLPs for implicit signal representation, with the
//! hyperbolic-oscillation activation `tanh(sharp · sin x)` alongside ReLU and
//! sine baselines.
//!
//! The crate is self-contained: dense `f64` matrices, a hand-written reverse
//! pass (including the gradient with respect to HOSC sharpness), Adam, signal
//! generators, metrics, and an experiment harness that reproduces image and
//! SDF fitting comparisons.

pub mod activation;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod network;
pub mod optim;
pub mod rng;
pub mod signals;
pub mod tensor;

pub use activation::Activation;
pub use error::{Error, Result};
pub use network::{ForwardTrace, Gradients, InitScheme, Mlp, MlpSpec};
pub use optim::{AdamConfig, AdamState, LrSchedule, Regularizer};
pub use rng::Rng;
pub use tensor::Matrix;
