//! Core vocabulary types: observations, actions, auxiliary inputs and the
//! agent-state vector the learners actually consume.
//!
//! The agent state is a pure function of (observation, auxiliary inputs,
//! previous action) selected by [`CompositionMode`]; composition is plain
//! concatenation in a fixed order so nothing is lost or reordered between
//! what the constructors produce and what the function approximator sees.

use serde::{Deserialize, Serialize};

/// Observation emitted by an environment. Flat f64 features; each
/// environment documents its own layout and dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationVector(pub Vec<f64>);

impl ObservationVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Discrete action, an index into the environment's action table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action(pub usize);

/// Ordered set of auxiliary-input channels. Channels concatenate in the
/// order they were pushed; an empty set is valid (obs-only agents).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuxiliaryInputSet {
    channels: Vec<Vec<f64>>,
}

impl AuxiliaryInputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, channel: Vec<f64>) {
        self.channels.push(channel);
    }

    pub fn from_channels(channels: Vec<Vec<f64>>) -> Self {
        AuxiliaryInputSet { channels }
    }

    pub fn total_dim(&self) -> usize {
        self.channels.iter().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.channels.iter().map(Vec::as_slice)
    }
}

/// Input vector handed to the action-value function.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentStateVector(pub Vec<f64>);

impl AgentStateVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// How observation, auxiliary inputs and the previous action combine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompositionMode {
    /// Observation alone.
    ObsOnly,
    /// Auxiliary channels alone (e.g. a belief state used verbatim).
    AuxOnly,
    /// Observation followed by auxiliary channels in declaration order.
    ObsAux,
    /// Observation, auxiliary channels, then a one-hot of the previous
    /// action (all zeros on the first step of an episode).
    ObsAuxAction,
}

/// Builds the agent state. `prev_action` is only consulted in
/// [`CompositionMode::ObsAuxAction`]; `None` encodes "no action yet" and
/// yields an all-zero action block.
pub fn build_agent_state(
    obs: &ObservationVector,
    aux: &AuxiliaryInputSet,
    prev_action: Option<Action>,
    action_count: usize,
    mode: CompositionMode,
) -> AgentStateVector {
    let mut out = Vec::with_capacity(obs.dim() + aux.total_dim() + action_count);
    match mode {
        CompositionMode::ObsOnly => out.extend_from_slice(obs.as_slice()),
        CompositionMode::AuxOnly => {
            for ch in aux.iter() {
                out.extend_from_slice(ch);
            }
        }
        CompositionMode::ObsAux => {
            out.extend_from_slice(obs.as_slice());
            for ch in aux.iter() {
                out.extend_from_slice(ch);
            }
        }
        CompositionMode::ObsAuxAction => {
            out.extend_from_slice(obs.as_slice());
            for ch in aux.iter() {
                out.extend_from_slice(ch);
            }
            let base = out.len();
            out.resize(base + action_count, 0.0);
            if let Some(Action(a)) = prev_action {
                assert!(a < action_count, "action {a} out of range {action_count}");
                out[base + a] = 1.0;
            }
        }
    }
    AgentStateVector(out)
}

/// Recurrent cell state captured alongside a transition so truncated
/// backprop can warm-start from the step where a replay window begins.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenSnapshot {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

/// One environment transition as stored for learning.
#[derive(Clone, Debug)]
pub struct TransitionRecord {
    pub x: AgentStateVector,
    pub action: Action,
    pub reward: f64,
    pub x_next: AgentStateVector,
    pub action_next: Action,
    pub terminal: bool,
    /// Recurrent state *before* consuming `x`; `None` for feedforward agents.
    pub hidden: Option<HiddenSnapshot>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(v: &[f64]) -> ObservationVector {
        ObservationVector(v.to_vec())
    }

    #[test]
    fn obs_aux_concatenates_in_declared_order() {
        // A 9-feature observation plus two scalar trace channels gives an
        // 11-dim agent state with the traces at the tail.
        let o = obs(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        let mut aux = AuxiliaryInputSet::new();
        aux.push(vec![0.81]);
        aux.push(vec![0.9]);
        let x = build_agent_state(&o, &aux, None, 3, CompositionMode::ObsAux);
        assert_eq!(x.dim(), 11);
        assert_eq!(&x.as_slice()[..9], o.as_slice());
        assert_eq!(x.as_slice()[9], 0.81);
        assert_eq!(x.as_slice()[10], 0.9);
    }

    #[test]
    fn aux_only_passes_belief_verbatim() {
        let o = obs(&[1.0; 9]);
        let belief: Vec<f64> = (0..12).map(|i| i as f64 / 66.0).collect();
        let aux = AuxiliaryInputSet::from_channels(vec![belief.clone()]);
        let x = build_agent_state(&o, &aux, None, 3, CompositionMode::AuxOnly);
        assert_eq!(x.as_slice(), belief.as_slice());
    }

    #[test]
    fn action_block_is_one_hot_or_zero() {
        let o = obs(&[0.5, 0.25]);
        let aux = AuxiliaryInputSet::from_channels(vec![vec![0.1]]);
        let x = build_agent_state(&o, &aux, Some(Action(2)), 4, CompositionMode::ObsAuxAction);
        assert_eq!(x.as_slice(), &[0.5, 0.25, 0.1, 0.0, 0.0, 1.0, 0.0]);
        let x0 = build_agent_state(&o, &aux, None, 4, CompositionMode::ObsAuxAction);
        assert_eq!(&x0.as_slice()[3..], &[0.0; 4]);
    }

    #[test]
    fn obs_only_ignores_aux() {
        let o = obs(&[3.0, 4.0]);
        let aux = AuxiliaryInputSet::from_channels(vec![vec![9.0; 5]]);
        let x = build_agent_state(&o, &aux, None, 2, CompositionMode::ObsOnly);
        assert_eq!(x.as_slice(), o.as_slice());
    }
}
