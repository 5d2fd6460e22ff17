//! Benchmark environments.
//!
//! Each environment implements [`Environment`] (a stateful simulator driven
//! by an [`RngStream`]) and, where the state space is small enough to
//! enumerate, [`EnumerableModel`] (analytic transition rows and emissions,
//! the route used by exact filters, value iteration and the model-vs-
//! simulator binding tests). The two routes are written independently on
//! purpose: the simulator samples events procedurally, the model multiplies
//! event probabilities, and tests hold them together.
//!
//! Layouts (grid geometry, rates, sensor constants) are data: they parse
//! from a line-oriented text format and the canonical presets are embedded
//! as strings (see [`layout`]).

pub mod compass;
pub mod fishing;
pub mod layout;
pub mod lobster;
pub mod rocksample;

use crate::rng::RngStream;
use crate::state::{Action, ObservationVector};

/// One step's outcome.
#[derive(Clone, Debug)]
pub struct Step {
    pub obs: ObservationVector,
    pub reward: f64,
    pub terminal: bool,
}

/// A stateful simulator. `reset` starts an episode (or the single continuing
/// run) and returns the initial observation.
pub trait Environment {
    fn observation_dim(&self) -> usize;
    fn action_count(&self) -> usize;
    fn reset(&mut self, rng: &mut RngStream) -> ObservationVector;
    fn step(&mut self, action: Action, rng: &mut RngStream) -> Step;
}

/// Analytic model over an enumerated state space. Indices are stable and
/// documented per environment.
pub trait EnumerableModel {
    fn state_count(&self) -> usize;
    fn action_count(&self) -> usize;
    /// Probability-weighted successor states; probabilities sum to 1.
    fn transition_row(&self, state: usize, action: Action) -> Vec<(usize, f64)>;
    /// Reward as a function of (state, action); all these environments have
    /// rewards that are deterministic given the state-action pair.
    fn reward(&self, state: usize, action: Action) -> f64;
    fn is_terminal(&self, state: usize) -> bool;
    /// Start distribution as (state, probability) pairs.
    fn start_distribution(&self) -> Vec<(usize, f64)>;
    /// The (deterministic) observation emitted in `state`. Emission
    /// probability of an observation is therefore 0/1 equality.
    fn observation_of(&self, state: usize) -> ObservationVector;
}
