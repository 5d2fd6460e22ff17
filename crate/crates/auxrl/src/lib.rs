//! Agent-state construction for partially observable reinforcement learning.
//!
//! The agent never sees the environment state; it sees an observation vector and
//! builds its own input ("agent state") from that observation plus auxiliary
//! inputs: decaying traces of past observations, particle-filter beliefs, or
//! hand-derived likelihood predictors. This crate provides:
//!
//! * the agent-state plumbing itself ([`state`], [`rng`]),
//! * four benchmark environments ([`envs`]): Lobster, Compass World,
//!   RockSample(7,8) and the Fishing gridworlds,
//! * auxiliary-input constructors ([`trace`], [`likelihood`], [`filter`]),
//! * semi-gradient Sarsa learners with linear, MLP, recurrent and convolutional
//!   action-value functions ([`learn`]),
//! * exact solvers used as baselines and test oracles ([`oracle`]).
//!
//! Everything is deterministic given a seed: random draws flow through
//! [`rng::RngStream`], a counter-based generator with labeled forking.

pub mod envs;
pub mod filter;
pub mod learn;
pub mod likelihood;
pub mod oracle;
pub mod rng;
pub mod state;
pub mod trace;

pub use rng::RngStream;
pub use state::{Action, AgentStateVector, AuxiliaryInputSet, CompositionMode, ObservationVector};
