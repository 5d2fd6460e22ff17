//! RockSample(7, 8): a rover on a 7×7 grid with 8 rocks of hidden quality.
//!
//! Rock positions are sampled once per run (uniform over distinct cells,
//! deterministic in the layout stream) and stay fixed across episodes; rock
//! qualities are i.i.d. Bernoulli(1/2) per episode. The rover starts at
//! (0, 3), the middle of the west edge. Moves are deterministic and clipped
//! at borders, except moving east off the grid, which ends the episode with
//! +10. `sample` on a rock pays +10 if it is good and −10 if not, and turns
//! it bad either way; `sample` off-rock does nothing. `check i` points a
//! noisy long-range sensor at rock i: the reading equals the true quality
//! with probability 0.5·(1 + 2^(−δ/δ½)) where δ is the Euclidean distance
//! to the rock and δ½ the sensor's half-efficiency distance.
//!
//! Observation (22 features): one-hot x (7), one-hot y (7), then one memory
//! feature per rock holding the last sensor reading for that rock — 0.5
//! before any check, else the 0/1 reading.
//!
//! The quality subspace is enumerated for belief tracking: index bit i (LSB
//! = rock 0) is 1 when rock i is good, 256 points.

use super::{Environment, Step};
use crate::rng::RngStream;
use crate::state::{Action, ObservationVector};

pub const UP: Action = Action(0);
pub const RIGHT: Action = Action(1);
pub const DOWN: Action = Action(2);
pub const LEFT: Action = Action(3);
pub const SAMPLE: Action = Action(4);
/// `check i` for rock i is action `CHECK_BASE + i`.
pub const CHECK_BASE: usize = 5;

pub const GRID: usize = 7;
pub const ROCKS: usize = 8;
pub const ACTION_COUNT: usize = CHECK_BASE + ROCKS;
pub const OBS_DIM: usize = 2 * GRID + ROCKS;
pub const QUALITY_STATES: usize = 1 << ROCKS;

pub fn action_name(a: Action) -> String {
    match a.0 {
        0 => "up".into(),
        1 => "right".into(),
        2 => "down".into(),
        3 => "left".into(),
        4 => "sample".into(),
        i if i < ACTION_COUNT => format!("check_{}", i - CHECK_BASE + 1),
        i => panic!("rocksample has {ACTION_COUNT} actions, got {i}"),
    }
}

/// Probability a check reading equals the true quality at distance `delta`.
pub fn check_accuracy(delta: f64, half_efficiency: f64) -> f64 {
    0.5 * (1.0 + (-delta / half_efficiency).exp2())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RockSampleParams {
    pub half_efficiency: f64,
}

impl Default for RockSampleParams {
    fn default() -> Self {
        RockSampleParams { half_efficiency: 5.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RockSampleState {
    pub x: u8,
    pub y: u8,
    pub good: [bool; ROCKS],
    /// Last sensor reading per rock; 0.5 until the rock is first checked.
    pub readings: [f64; ROCKS],
}

pub fn start_position() -> (u8, u8) {
    (0, (GRID / 2) as u8)
}

/// Sample 8 distinct rock cells; the layout stream makes this a pure
/// function of the run seed.
pub fn sample_rock_cells(rng: &mut RngStream) -> [(u8, u8); ROCKS] {
    let mut cells: Vec<usize> = (0..GRID * GRID).collect();
    let mut picked = [(0u8, 0u8); ROCKS];
    for (i, slot) in picked.iter_mut().enumerate() {
        let j = i + rng.below(cells.len() - i);
        cells.swap(i, j);
        *slot = ((cells[i] % GRID) as u8, (cells[i] / GRID) as u8);
    }
    picked
}

pub struct RockSample {
    params: RockSampleParams,
    rocks: [(u8, u8); ROCKS],
    state: RockSampleState,
}

impl RockSample {
    /// `layout_rng` fixes the rock positions for the lifetime of this
    /// instance; episode randomness comes from the stream passed to
    /// `reset`/`step`.
    pub fn new(params: RockSampleParams, layout_rng: &mut RngStream) -> Self {
        let rocks = sample_rock_cells(layout_rng);
        Self::with_rocks(params, rocks)
    }

    pub fn with_rocks(params: RockSampleParams, rocks: [(u8, u8); ROCKS]) -> Self {
        let (x, y) = start_position();
        RockSample {
            params,
            rocks,
            state: RockSampleState { x, y, good: [false; ROCKS], readings: [0.5; ROCKS] },
        }
    }

    pub fn rocks(&self) -> &[(u8, u8); ROCKS] {
        &self.rocks
    }

    pub fn state(&self) -> &RockSampleState {
        &self.state
    }

    pub fn params(&self) -> &RockSampleParams {
        &self.params
    }

    pub fn force_state(&mut self, state: RockSampleState) {
        self.state = state;
    }

    /// Quality-subspace index of the current true qualities.
    pub fn quality_index(&self) -> usize {
        quality_index(&self.state.good)
    }

    fn rock_at(&self, x: u8, y: u8) -> Option<usize> {
        self.rocks.iter().position(|&(rx, ry)| rx == x && ry == y)
    }

    fn observation(&self) -> ObservationVector {
        let mut o = vec![0.0; OBS_DIM];
        o[self.state.x as usize] = 1.0;
        o[GRID + self.state.y as usize] = 1.0;
        for i in 0..ROCKS {
            o[2 * GRID + i] = self.state.readings[i];
        }
        ObservationVector(o)
    }
}

pub fn quality_index(good: &[bool; ROCKS]) -> usize {
    good.iter().enumerate().fold(0, |acc, (i, &g)| acc | ((g as usize) << i))
}

pub fn quality_from_index(index: usize) -> [bool; ROCKS] {
    let mut good = [false; ROCKS];
    for (i, g) in good.iter_mut().enumerate() {
        *g = (index >> i) & 1 == 1;
    }
    good
}

pub fn distance(a: (u8, u8), b: (u8, u8)) -> f64 {
    let dx = a.0 as f64 - b.0 as f64;
    let dy = a.1 as f64 - b.1 as f64;
    (dx * dx + dy * dy).sqrt()
}

impl Environment for RockSample {
    fn observation_dim(&self) -> usize {
        OBS_DIM
    }

    fn action_count(&self) -> usize {
        ACTION_COUNT
    }

    fn reset(&mut self, rng: &mut RngStream) -> ObservationVector {
        let (x, y) = start_position();
        self.state.x = x;
        self.state.y = y;
        for g in &mut self.state.good {
            *g = rng.bernoulli(0.5);
        }
        self.state.readings = [0.5; ROCKS];
        self.observation()
    }

    fn step(&mut self, action: Action, rng: &mut RngStream) -> Step {
        let mut reward = 0.0;
        let mut terminal = false;
        match action.0 {
            0 => self.state.y = self.state.y.saturating_sub(1),
            1 => {
                if self.state.x as usize + 1 >= GRID {
                    reward = 10.0;
                    terminal = true;
                } else {
                    self.state.x += 1;
                }
            }
            2 => self.state.y = (self.state.y + 1).min(GRID as u8 - 1),
            3 => self.state.x = self.state.x.saturating_sub(1),
            4 => {
                if let Some(i) = self.rock_at(self.state.x, self.state.y) {
                    reward = if self.state.good[i] { 10.0 } else { -10.0 };
                    self.state.good[i] = false;
                }
            }
            i if i < ACTION_COUNT => {
                let rock = i - CHECK_BASE;
                let delta = distance((self.state.x, self.state.y), self.rocks[rock]);
                let acc = check_accuracy(delta, self.params.half_efficiency);
                let truthful = rng.bernoulli(acc);
                let reading = truthful == self.state.good[rock];
                self.state.readings[rock] = if reading { 1.0 } else { 0.0 };
            }
            i => panic!("rocksample has {ACTION_COUNT} actions, got {i}"),
        }
        Step { obs: self.observation(), reward, terminal }
    }
}

/// Analytic model over the 256-point quality subspace. The subspace is only
/// Markov given the rover position (sampling acts at the rover's cell), so
/// queries take the position explicitly.
#[derive(Clone, Debug)]
pub struct RockQualityModel {
    pub rocks: [(u8, u8); ROCKS],
    pub half_efficiency: f64,
}

impl RockQualityModel {
    pub fn new(rocks: [(u8, u8); ROCKS], half_efficiency: f64) -> Self {
        RockQualityModel { rocks, half_efficiency }
    }

    pub fn rock_at(&self, pos: (u8, u8)) -> Option<usize> {
        self.rocks.iter().position(|&r| r == pos)
    }

    /// Deterministic successor of quality state `q` when the rover at `pos`
    /// takes `action`.
    pub fn successor(&self, q: usize, action: Action, pos: (u8, u8)) -> usize {
        if action == SAMPLE {
            if let Some(i) = self.rock_at(pos) {
                return q & !(1 << i);
            }
        }
        q
    }

    /// P(last reading of rock i = `reading` | quality state, rover at `pos`)
    /// for a `check i` action.
    pub fn check_emission(&self, q: usize, rock: usize, reading: bool, pos: (u8, u8)) -> f64 {
        let acc = check_accuracy(distance(pos, self.rocks[rock]), self.half_efficiency);
        let good = (q >> rock) & 1 == 1;
        if good == reading {
            acc
        } else {
            1.0 - acc
        }
    }
}
