//! Lobster fishing: a three-location chain with two reward pots.
//!
//! Locations form L1 — L0 — L2; `left` moves toward L1, `right` toward L2,
//! and either move succeeds with probability `p_move` (the boat drifts back
//! otherwise). `collect` empties a full pot at the boat's location for +1.
//! An empty pot refills per step with probability 1 − exp(−1/Λ). The task is
//! continuing: there is no terminal state.
//!
//! The agent only sees whether the pot *here* is full: the 9-feature
//! observation is a location one-hot (0..3) followed by one triple per pot
//! (observable-and-missing, observable-and-present, unobservable), so pots
//! at other locations always read "unobservable".
//!
//! State enumeration: `index = location·4 + pot1·2 + pot2` (pot bits are
//! 1 when full), 12 states in total.

use super::{EnumerableModel, Environment, Step};
use crate::rng::RngStream;
use crate::state::{Action, ObservationVector};

pub const LEFT: Action = Action(0);
pub const RIGHT: Action = Action(1);
pub const COLLECT: Action = Action(2);
pub const ACTION_NAMES: [&str; 3] = ["left", "right", "collect"];

pub const STATE_COUNT: usize = 12;
pub const OBS_DIM: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LobsterState {
    /// 0 = home, 1 = left pot, 2 = right pot.
    pub location: u8,
    /// `pots[i]` is true when the pot at L(i+1) is full.
    pub pots: [bool; 2],
}

impl LobsterState {
    pub fn index(&self) -> usize {
        self.location as usize * 4 + (self.pots[0] as usize) * 2 + self.pots[1] as usize
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < STATE_COUNT);
        LobsterState {
            location: (index / 4) as u8,
            pots: [(index / 2) % 2 == 1, index % 2 == 1],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LobsterParams {
    /// Probability a left/right move succeeds.
    pub p_move: f64,
    /// Mean steps between regeneration events (Λ); the per-step refill
    /// probability of an empty pot is 1 − exp(−1/Λ).
    pub regen_mean: f64,
}

impl Default for LobsterParams {
    fn default() -> Self {
        LobsterParams { p_move: 0.6, regen_mean: 10.0 }
    }
}

impl LobsterParams {
    pub fn regen_prob(&self) -> f64 {
        1.0 - (-1.0 / self.regen_mean).exp()
    }
}

/// Where a successful move lands from each location.
fn move_target(location: u8, action: Action) -> u8 {
    match (location, action) {
        (0, LEFT) => 1,
        (0, RIGHT) => 2,
        (1, RIGHT) => 0,
        (2, LEFT) => 0,
        // Moving outward from an end of the chain goes nowhere.
        (loc, _) => loc,
    }
}

/// The start state: at home with both pots full.
pub fn start_state() -> LobsterState {
    LobsterState { location: 0, pots: [true, true] }
}

pub fn observation(state: &LobsterState) -> ObservationVector {
    let mut o = vec![0.0; OBS_DIM];
    o[state.location as usize] = 1.0;
    for i in 0..2 {
        let base = 3 * (i + 1);
        if state.location as usize == i + 1 {
            if state.pots[i] {
                o[base + 1] = 1.0; // observable and present
            } else {
                o[base] = 1.0; // observable and missing
            }
        } else {
            o[base + 2] = 1.0; // unobservable
        }
    }
    ObservationVector(o)
}

/// Sample one transition. Order of events: the move or collect resolves
/// first, then every pot that was empty at the *start* of the step refills
/// with probability 1 − exp(−1/Λ) (a pot collected this step stays empty
/// until the next step).
pub fn sample_transition(
    state: &LobsterState,
    action: Action,
    params: &LobsterParams,
    rng: &mut RngStream,
) -> (LobsterState, f64) {
    let mut next = *state;
    let mut reward = 0.0;
    match action {
        LEFT | RIGHT => {
            if rng.bernoulli(params.p_move) {
                next.location = move_target(state.location, action);
            }
        }
        COLLECT => {
            let loc = state.location as usize;
            if loc >= 1 && next.pots[loc - 1] {
                next.pots[loc - 1] = false;
                reward = 1.0;
            }
        }
        _ => panic!("lobster has 3 actions, got {:?}", action),
    }
    let p = params.regen_prob();
    for i in 0..2 {
        if !state.pots[i] && rng.bernoulli(p) {
            next.pots[i] = true;
        }
    }
    (next, reward)
}

pub struct Lobster {
    params: LobsterParams,
    state: LobsterState,
}

impl Lobster {
    pub fn new(params: LobsterParams) -> Self {
        Lobster { params, state: start_state() }
    }

    pub fn params(&self) -> &LobsterParams {
        &self.params
    }

    pub fn state(&self) -> &LobsterState {
        &self.state
    }

    /// Teleport to an arbitrary state; used by model-binding tests and
    /// diagnostics, never by agents.
    pub fn force_state(&mut self, state: LobsterState) {
        self.state = state;
    }
}

impl Environment for Lobster {
    fn observation_dim(&self) -> usize {
        OBS_DIM
    }

    fn action_count(&self) -> usize {
        3
    }

    fn reset(&mut self, _rng: &mut RngStream) -> ObservationVector {
        self.state = start_state();
        observation(&self.state)
    }

    fn step(&mut self, action: Action, rng: &mut RngStream) -> Step {
        let (next, reward) = sample_transition(&self.state, action, &self.params, rng);
        self.state = next;
        Step { obs: observation(&self.state), reward, terminal: false }
    }
}

/// Analytic model; the same event structure as [`sample_transition`] but
/// expressed as exact probabilities.
#[derive(Clone, Debug)]
pub struct LobsterModel {
    pub params: LobsterParams,
}

impl LobsterModel {
    pub fn new(params: LobsterParams) -> Self {
        LobsterModel { params }
    }
}

impl EnumerableModel for LobsterModel {
    fn state_count(&self) -> usize {
        STATE_COUNT
    }

    fn action_count(&self) -> usize {
        3
    }

    fn transition_row(&self, state: usize, action: Action) -> Vec<(usize, f64)> {
        let s = LobsterState::from_index(state);
        // Movement outcomes: (location, probability) after the action.
        let mut pots_after_action = s.pots;
        let move_outcomes: Vec<(u8, f64)> = match action {
            LEFT | RIGHT => {
                let target = move_target(s.location, action);
                if target == s.location {
                    vec![(s.location, 1.0)]
                } else {
                    vec![(target, self.params.p_move), (s.location, 1.0 - self.params.p_move)]
                }
            }
            COLLECT => {
                let loc = s.location as usize;
                if loc >= 1 && s.pots[loc - 1] {
                    pots_after_action[loc - 1] = false;
                }
                vec![(s.location, 1.0)]
            }
            _ => panic!("lobster has 3 actions, got {:?}", action),
        };
        // Regeneration branches for pots empty at the start of the step.
        let q = self.params.regen_prob();
        let mut row = vec![0.0; STATE_COUNT];
        for (loc, p_loc) in move_outcomes {
            let mut branches: Vec<([bool; 2], f64)> = vec![(pots_after_action, 1.0)];
            for i in 0..2 {
                if !s.pots[i] {
                    let mut split = Vec::with_capacity(branches.len() * 2);
                    for (pots, p) in branches {
                        let mut filled = pots;
                        filled[i] = true;
                        split.push((filled, p * q));
                        split.push((pots, p * (1.0 - q)));
                    }
                    branches = split;
                }
            }
            for (pots, p) in branches {
                let idx = LobsterState { location: loc, pots }.index();
                row[idx] += p_loc * p;
            }
        }
        row.into_iter().enumerate().filter(|&(_, p)| p > 0.0).collect()
    }

    fn reward(&self, state: usize, action: Action) -> f64 {
        let s = LobsterState::from_index(state);
        let loc = s.location as usize;
        if action == COLLECT && loc >= 1 && s.pots[loc - 1] {
            1.0
        } else {
            0.0
        }
    }

    fn is_terminal(&self, _state: usize) -> bool {
        false
    }

    fn start_distribution(&self) -> Vec<(usize, f64)> {
        vec![(start_state().index(), 1.0)]
    }

    fn observation_of(&self, state: usize) -> ObservationVector {
        observation(&LobsterState::from_index(state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_index_round_trips() {
        for i in 0..STATE_COUNT {
            assert_eq!(LobsterState::from_index(i).index(), i);
        }
        assert_eq!(start_state().index(), 3);
    }

    #[test]
    fn observation_has_one_hot_triples() {
        for i in 0..STATE_COUNT {
            let o = observation(&LobsterState::from_index(i));
            for group in [0..3, 3..6, 6..9] {
                let ones = o.as_slice()[group].iter().filter(|&&v| v == 1.0).count();
                assert_eq!(ones, 1, "state {i}: each triple carries exactly one 1");
            }
        }
    }

    #[test]
    fn observation_matches_pot_visibility() {
        let at_l1_full = LobsterState { location: 1, pots: [true, false] };
        let o = observation(&at_l1_full);
        assert_eq!(o.as_slice()[4], 1.0, "pot here present");
        assert_eq!(o.as_slice()[8], 1.0, "other pot unobservable");
        let at_l0 = LobsterState { location: 0, pots: [true, true] };
        let o = observation(&at_l0);
        assert_eq!(o.as_slice()[5], 1.0);
        assert_eq!(o.as_slice()[8], 1.0);
    }

    #[test]
    fn collect_empties_the_pot_deterministically() {
        let params = LobsterParams::default();
        let mut rng = RngStream::from_seed(1);
        let s = LobsterState { location: 1, pots: [true, true] };
        let (next, r) = sample_transition(&s, COLLECT, &params, &mut rng);
        assert_eq!(r, 1.0);
        assert!(!next.pots[0], "collected pot is empty after the step");
    }

    #[test]
    fn collect_at_home_changes_nothing_but_regeneration() {
        let params = LobsterParams::default();
        let mut rng = RngStream::from_seed(2);
        let s = LobsterState { location: 0, pots: [true, true] };
        let (next, r) = sample_transition(&s, COLLECT, &params, &mut rng);
        assert_eq!(r, 0.0);
        assert_eq!(next, s, "full pots cannot regenerate, nothing moves");
    }

    #[test]
    fn moves_fail_by_staying() {
        let params = LobsterParams { p_move: 0.0, regen_mean: 10.0 };
        let mut rng = RngStream::from_seed(3);
        let s = start_state();
        let (next, _) = sample_transition(&s, LEFT, &params, &mut rng);
        assert_eq!(next.location, 0);
        let params = LobsterParams { p_move: 1.0, regen_mean: 10.0 };
        let (next, _) = sample_transition(&s, LEFT, &params, &mut rng);
        assert_eq!(next.location, 1);
    }

    #[test]
    fn outward_moves_are_no_ops() {
        assert_eq!(move_target(1, LEFT), 1);
        assert_eq!(move_target(2, RIGHT), 2);
    }

    #[test]
    fn rows_are_distributions() {
        let model = LobsterModel::new(LobsterParams::default());
        for s in 0..STATE_COUNT {
            for a in 0..3 {
                let row = model.transition_row(s, Action(a));
                let total: f64 = row.iter().map(|&(_, p)| p).sum();
                assert!((total - 1.0).abs() < 1e-12, "row ({s},{a}) sums to {total}");
            }
        }
    }

    #[test]
    fn analytic_row_spot_check() {
        // From (L0, both empty) moving left: location splits 0.6/0.4 and each
        // pot refills independently with q = 1 − exp(−0.1).
        let params = LobsterParams::default();
        let model = LobsterModel::new(params);
        let q = params.regen_prob();
        let s = LobsterState { location: 0, pots: [false, false] }.index();
        let row = model.transition_row(s, LEFT);
        let lookup = |st: LobsterState| -> f64 {
            row.iter().find(|&&(i, _)| i == st.index()).map(|&(_, p)| p).unwrap_or(0.0)
        };
        let expect = 0.6 * q * (1.0 - q);
        let got = lookup(LobsterState { location: 1, pots: [true, false] });
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        let expect = 0.4 * (1.0 - q) * (1.0 - q);
        let got = lookup(LobsterState { location: 0, pots: [false, false] });
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn regen_probability_value() {
        let params = LobsterParams::default();
        assert!((params.regen_prob() - 0.09516258196404048).abs() < 1e-15);
    }
}
