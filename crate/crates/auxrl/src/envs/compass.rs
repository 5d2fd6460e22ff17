//! Compass World: a walled 7×7 room where the agent only sees the color of
//! the wall cell directly in front of it.
//!
//! The interior is 7×7 (x, y ∈ 0..7; y grows southward) surrounded by
//! colored walls: north orange, east yellow, south red, west blue, except
//! the middle of the west wall (beside y = 3) which is green. Facing green
//! from (0, 3) ends the episode with reward +1; every other step pays 0.
//! Actions are forward / turn-left / turn-right, all deterministic; walking
//! into a wall is a no-op. Episodes start uniformly over every
//! (position, pose) that is not already facing green.
//!
//! Observation: 5 features, a one-hot over {orange, yellow, red, blue,
//! green} when facing a wall cell, all zeros when facing an interior cell.
//!
//! State enumeration: `index = (y·7 + x)·4 + pose` with poses ordered
//! N, E, S, W; 196 states, exactly one of which (index of (0,3,W)) is
//! terminal.

use super::{EnumerableModel, Environment, Step};
use crate::rng::RngStream;
use crate::state::{Action, ObservationVector};

pub const FORWARD: Action = Action(0);
pub const TURN_LEFT: Action = Action(1);
pub const TURN_RIGHT: Action = Action(2);
pub const ACTION_NAMES: [&str; 3] = ["forward", "turn-left", "turn-right"];

pub const INTERIOR: usize = 7;
pub const STATE_COUNT: usize = INTERIOR * INTERIOR * 4;
pub const OBS_DIM: usize = 5;
/// Index order of wall colors in the observation.
pub const COLOR_NAMES: [&str; 5] = ["orange", "yellow", "red", "blue", "green"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pose {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Pose {
    pub fn from_index(i: usize) -> Pose {
        match i {
            0 => Pose::North,
            1 => Pose::East,
            2 => Pose::South,
            3 => Pose::West,
            _ => panic!("pose index {i}"),
        }
    }

    fn left(self) -> Pose {
        Pose::from_index((self as usize + 3) % 4)
    }

    fn right(self) -> Pose {
        Pose::from_index((self as usize + 1) % 4)
    }

    /// Unit step (dx, dy); y grows southward.
    fn delta(self) -> (i32, i32) {
        match self {
            Pose::North => (0, -1),
            Pose::East => (1, 0),
            Pose::South => (0, 1),
            Pose::West => (-1, 0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompassState {
    pub x: u8,
    pub y: u8,
    pub pose: Pose,
}

impl CompassState {
    pub fn index(&self) -> usize {
        (self.y as usize * INTERIOR + self.x as usize) * 4 + self.pose as usize
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < STATE_COUNT);
        let cell = index / 4;
        CompassState {
            x: (cell % INTERIOR) as u8,
            y: (cell / INTERIOR) as u8,
            pose: Pose::from_index(index % 4),
        }
    }
}

/// The unique terminal configuration: at (0, 3) facing the green cell in
/// the middle of the west wall.
pub fn goal_state() -> CompassState {
    CompassState { x: 0, y: 3, pose: Pose::West }
}

/// Color seen from `state`, if it faces a wall cell.
/// 0 orange (N), 1 yellow (E), 2 red (S), 3 blue (W), 4 green.
pub fn facing_color(state: &CompassState) -> Option<usize> {
    let (dx, dy) = state.pose.delta();
    let nx = state.x as i32 + dx;
    let ny = state.y as i32 + dy;
    let limit = INTERIOR as i32;
    if nx >= 0 && nx < limit && ny >= 0 && ny < limit {
        return None;
    }
    Some(match state.pose {
        Pose::North => 0,
        Pose::East => 1,
        Pose::South => 2,
        Pose::West => {
            if state.y == 3 {
                4
            } else {
                3
            }
        }
    })
}

pub fn observation(state: &CompassState) -> ObservationVector {
    let mut o = vec![0.0; OBS_DIM];
    if let Some(c) = facing_color(state) {
        o[c] = 1.0;
    }
    ObservationVector(o)
}

/// Deterministic transition; returns (next state, reward, terminal).
pub fn transition(state: &CompassState, action: Action) -> (CompassState, f64, bool) {
    let mut next = *state;
    match action {
        FORWARD => {
            let (dx, dy) = state.pose.delta();
            let nx = state.x as i32 + dx;
            let ny = state.y as i32 + dy;
            let limit = INTERIOR as i32;
            if nx >= 0 && nx < limit && ny >= 0 && ny < limit {
                next.x = nx as u8;
                next.y = ny as u8;
            }
        }
        TURN_LEFT => next.pose = state.pose.left(),
        TURN_RIGHT => next.pose = state.pose.right(),
        _ => panic!("compass has 3 actions, got {:?}", action),
    }
    if next == goal_state() {
        (next, 1.0, true)
    } else {
        (next, 0.0, false)
    }
}

pub struct Compass {
    state: CompassState,
}

impl Compass {
    pub fn new() -> Self {
        Compass { state: CompassState { x: 3, y: 3, pose: Pose::North } }
    }

    pub fn state(&self) -> &CompassState {
        &self.state
    }

    pub fn force_state(&mut self, state: CompassState) {
        self.state = state;
    }

    /// All states an episode may start in: everything except the goal
    /// configuration itself.
    pub fn start_states() -> Vec<usize> {
        let goal = goal_state().index();
        (0..STATE_COUNT).filter(|&i| i != goal).collect()
    }
}

impl Default for Compass {
    fn default() -> Self {
        Self::new()
    }
}

impl Environment for Compass {
    fn observation_dim(&self) -> usize {
        OBS_DIM
    }

    fn action_count(&self) -> usize {
        3
    }

    fn reset(&mut self, rng: &mut RngStream) -> ObservationVector {
        let starts = Self::start_states();
        self.state = CompassState::from_index(starts[rng.below(starts.len())]);
        observation(&self.state)
    }

    fn step(&mut self, action: Action, _rng: &mut RngStream) -> Step {
        let (next, reward, terminal) = transition(&self.state, action);
        self.state = next;
        Step { obs: observation(&self.state), reward, terminal }
    }
}

/// Analytic model; transitions are deterministic so each row is a single
/// entry, with the goal state absorbing.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompassModel;

impl EnumerableModel for CompassModel {
    fn state_count(&self) -> usize {
        STATE_COUNT
    }

    fn action_count(&self) -> usize {
        3
    }

    fn transition_row(&self, state: usize, action: Action) -> Vec<(usize, f64)> {
        if self.is_terminal(state) {
            return vec![(state, 1.0)];
        }
        let (next, _, _) = transition(&CompassState::from_index(state), action);
        vec![(next.index(), 1.0)]
    }

    fn reward(&self, state: usize, action: Action) -> f64 {
        if self.is_terminal(state) {
            return 0.0;
        }
        transition(&CompassState::from_index(state), action).1
    }

    fn is_terminal(&self, state: usize) -> bool {
        state == goal_state().index()
    }

    fn start_distribution(&self) -> Vec<(usize, f64)> {
        let starts = Compass::start_states();
        let p = 1.0 / starts.len() as f64;
        starts.into_iter().map(|s| (s, p)).collect()
    }

    fn observation_of(&self, state: usize) -> ObservationVector {
        observation(&CompassState::from_index(state))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trips() {
        for i in 0..STATE_COUNT {
            assert_eq!(CompassState::from_index(i).index(), i);
        }
    }

    #[test]
    fn interior_facing_sees_nothing() {
        let s = CompassState { x: 3, y: 3, pose: Pose::North };
        assert_eq!(observation(&s).as_slice(), &[0.0; 5]);
    }

    #[test]
    fn wall_colors_by_side() {
        let north = CompassState { x: 2, y: 0, pose: Pose::North };
        assert_eq!(facing_color(&north), Some(0));
        let east = CompassState { x: 6, y: 5, pose: Pose::East };
        assert_eq!(facing_color(&east), Some(1));
        let south = CompassState { x: 4, y: 6, pose: Pose::South };
        assert_eq!(facing_color(&south), Some(2));
        let west = CompassState { x: 0, y: 1, pose: Pose::West };
        assert_eq!(facing_color(&west), Some(3));
        let green = CompassState { x: 0, y: 3, pose: Pose::West };
        assert_eq!(facing_color(&green), Some(4));
    }

    #[test]
    fn reaching_goal_pays_and_terminates() {
        // Stepping forward into (0,3) while facing west.
        let s = CompassState { x: 1, y: 3, pose: Pose::West };
        let (next, r, t) = transition(&s, FORWARD);
        assert_eq!(next, goal_state());
        assert_eq!(r, 1.0);
        assert!(t);
        // Turning into the goal pose at (0,3).
        let s = CompassState { x: 0, y: 3, pose: Pose::North };
        let (next, r, t) = transition(&s, TURN_LEFT);
        assert_eq!(next, goal_state());
        assert_eq!(r, 1.0);
        assert!(t);
    }

    #[test]
    fn forward_into_wall_is_a_no_op() {
        let s = CompassState { x: 0, y: 1, pose: Pose::West };
        let (next, r, t) = transition(&s, FORWARD);
        assert_eq!(next, s);
        assert_eq!(r, 0.0);
        assert!(!t);
    }

    #[test]
    fn turns_compose_to_identity() {
        for p in 0..4 {
            let pose = Pose::from_index(p);
            assert_eq!(pose.left().right(), pose);
            assert_eq!(pose.left().left().left().left(), pose);
        }
    }

    #[test]
    fn start_states_exclude_goal_only() {
        let starts = Compass::start_states();
        assert_eq!(starts.len(), STATE_COUNT - 1);
        assert!(!starts.contains(&goal_state().index()));
    }

    #[test]
    fn reset_covers_starts_uniformly_enough() {
        let mut env = Compass::new();
        let mut rng = RngStream::from_seed(4);
        let mut seen = vec![0usize; STATE_COUNT];
        for _ in 0..20_000 {
            env.reset(&mut rng);
            seen[env.state().index()] += 1;
        }
        assert_eq!(seen[goal_state().index()], 0);
        let nonzero = seen.iter().filter(|&&c| c > 0).count();
        assert_eq!(nonzero, STATE_COUNT - 1, "every start state reachable");
    }
}
