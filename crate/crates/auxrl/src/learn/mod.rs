//! Semi-gradient Sarsa(0) learners.
//!
//! Approximators (linear, one-hidden-layer MLP, gated recurrent cell,
//! convolutional stack) share a flat `Vec<f64>` parameter layout so one
//! optimizer path serves all of them. All arithmetic runs in f64; the
//! 32-bit mode quantizes parameters and optimizer moments to f32 precision
//! after each update rather than switching the compute type, which keeps
//! run comparisons honest while exercising reduced precision.
//!
//! Gradients are of the semi-gradient loss: bootstrapped targets are
//! computed first and treated as constants, exactly the quantity the
//! finite-difference tests probe.

pub mod adam;
pub mod cnn;
pub mod driver;
pub mod linear;
pub mod lstm;
pub mod mlp;
pub mod policy;
pub mod replay;

pub use adam::{quantize_f32, AdamState, Optimizer, Precision};
pub use driver::{evaluate_greedy, run_steps, Agent, CompositionSpec, Net, StateBuilder, StepEvent, UpdateMode};
pub use linear::{sarsa_linear_update, LinearQ};
pub use lstm::RecurrentQ;
pub use mlp::MlpQ;
pub use policy::epsilon_greedy;
pub use replay::ReplayBuffer;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("cannot select an action from an empty value vector")]
    NoActions,
}
