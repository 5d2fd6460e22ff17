//! Fishing: an 11×11 gridworld with walls, glass, stochastic currents and
//! regenerating rewards, observed through an occluded egocentric map.
//!
//! Movement: the agent picks N/E/S/W; with probability `slip` it stays put,
//! otherwise it moves unless blocked (walls, glass and the grid border all
//! block). If it then stands on a current cell it is pushed one step in the
//! current's direction (once; a blocked push is a no-op). Standing on a
//! present reward collects it for +1. Afterwards every absent reward
//! refills and every multi-direction current re-aims, each independently
//! with per-step probability 1 − exp(−1/rate); a re-aim draws uniformly
//! from the cell's allowed directions excluding the one it had.
//!
//! Observation: the agent sees the 5×5 window around itself, minus cells
//! with no line of sight (walls are opaque, glass transmits sight but not
//! movement, off-grid counts as opaque obstacle). Visible cells are written
//! into a persistent 21×21×6 egocentric map (21 = 2·11 − 1 covers the whole
//! world from any agent cell); the map shifts when the agent moves so the
//! center cell is always the agent, and cells keep their last-seen contents
//! until observed again. Channels, in order: obstacle, current-N, current-E,
//! current-S, current-W, reward. The observation is the flattened map,
//! channel-major, row-major within a channel.

use super::{Environment, Step};
use crate::rng::RngStream;
use crate::state::{Action, ObservationVector};

pub const ACTION_NAMES: [&str; 4] = ["north", "east", "south", "west"];
pub const ACTION_COUNT: usize = 4;
pub const WORLD: usize = 11;
pub const MAP_SIDE: usize = 2 * WORLD - 1; // 21
pub const MAP_CELLS: usize = MAP_SIDE * MAP_SIDE;
pub const CHANNELS: usize = 6;
pub const OBS_DIM: usize = MAP_CELLS * CHANNELS;
/// Window half-width: the agent sees the 5×5 block around itself.
const VIEW: i64 = 2;
/// Episodes are cut off after this many steps.
pub const EPISODE_CAP: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dir {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Dir {
    pub fn delta(self) -> (i64, i64) {
        match self {
            Dir::North => (0, -1),
            Dir::East => (1, 0),
            Dir::South => (0, 1),
            Dir::West => (-1, 0),
        }
    }

    pub fn from_index(i: usize) -> Dir {
        match i {
            0 => Dir::North,
            1 => Dir::East,
            2 => Dir::South,
            3 => Dir::West,
            _ => panic!("direction index {i}"),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Dir::North => 'N',
            Dir::East => 'E',
            Dir::South => 'S',
            Dir::West => 'W',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    Open,
    Wall,
    Glass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RewardSpec {
    pub x: u8,
    pub y: u8,
    /// Mean steps to refill once collected.
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurrentSpec {
    pub x: u8,
    pub y: u8,
    /// Mean steps between direction changes.
    pub rate: f64,
    /// Allowed directions; a single entry makes the current static.
    pub dirs: Vec<Dir>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FishingLayout {
    pub name: String,
    pub start: (u8, u8),
    pub slip: f64,
    /// Row-major `WORLD × WORLD` cell kinds.
    pub cells: Vec<CellKind>,
    pub rewards: Vec<RewardSpec>,
    pub currents: Vec<CurrentSpec>,
}

impl FishingLayout {
    pub fn empty(name: &str) -> Self {
        FishingLayout {
            name: name.to_string(),
            start: (5, 5),
            slip: 0.1,
            cells: vec![CellKind::Open; WORLD * WORLD],
            rewards: Vec::new(),
            currents: Vec::new(),
        }
    }

    pub fn cell(&self, x: i64, y: i64) -> CellKind {
        if x < 0 || y < 0 || x >= WORLD as i64 || y >= WORLD as i64 {
            // The border behaves like a wall: blocks movement and sight.
            CellKind::Wall
        } else {
            self.cells[y as usize * WORLD + x as usize]
        }
    }

    pub fn set_cell(&mut self, x: u8, y: u8, kind: CellKind) {
        self.cells[y as usize * WORLD + x as usize] = kind;
    }

    fn traversable(&self, x: i64, y: i64) -> bool {
        self.cell(x, y) == CellKind::Open
    }

    /// Sight passes through open cells and glass, not walls or the border.
    fn transparent(&self, x: i64, y: i64) -> bool {
        let k = self.cell(x, y);
        k == CellKind::Open || k == CellKind::Glass
    }

    pub fn reward_at(&self, x: u8, y: u8) -> Option<usize> {
        self.rewards.iter().position(|r| r.x == x && r.y == y)
    }

    pub fn current_at(&self, x: u8, y: u8) -> Option<usize> {
        self.currents.iter().position(|c| c.x == x && c.y == y)
    }

    /// Structural sanity: everything on-grid, markers on open cells,
    /// start traversable, direction sets non-empty and duplicate-free.
    pub fn validate(&self) -> Result<(), String> {
        if self.cells.len() != WORLD * WORLD {
            return Err(format!("{} cells, expected {}", self.cells.len(), WORLD * WORLD));
        }
        if !(0.0..=1.0).contains(&self.slip) {
            return Err(format!("slip {} outside [0,1]", self.slip));
        }
        if !self.traversable(self.start.0 as i64, self.start.1 as i64) {
            return Err("start cell is not open".into());
        }
        for r in &self.rewards {
            if !self.traversable(r.x as i64, r.y as i64) {
                return Err(format!("reward at ({},{}) is not on an open cell", r.x, r.y));
            }
            if r.rate <= 0.0 {
                return Err(format!("reward rate {} must be positive", r.rate));
            }
        }
        for c in &self.currents {
            if !self.traversable(c.x as i64, c.y as i64) {
                return Err(format!("current at ({},{}) is not on an open cell", c.x, c.y));
            }
            if c.rate <= 0.0 {
                return Err(format!("current rate {} must be positive", c.rate));
            }
            if c.dirs.is_empty() {
                return Err(format!("current at ({},{}) has no directions", c.x, c.y));
            }
            let mut d = c.dirs.clone();
            d.sort();
            d.dedup();
            if d.len() != c.dirs.len() {
                return Err(format!("current at ({},{}) repeats a direction", c.x, c.y));
            }
        }
        Ok(())
    }
}

/// Integer line of sight from `from` to `to` (inclusive endpoints excluded):
/// walks the Bresenham line and reports whether every intermediate cell is
/// transparent. Deterministic tie-handling: the line steps along the major
/// axis and only moves on the minor axis once the accumulated error crosses
/// half a cell, so exact half-crossings stay on the major axis.
fn line_of_sight(layout: &FishingLayout, from: (i64, i64), to: (i64, i64)) -> bool {
    let (mut x, mut y) = from;
    let dx = (to.0 - from.0).abs();
    let dy = (to.1 - from.1).abs();
    let sx = (to.0 - from.0).signum();
    let sy = (to.1 - from.1).signum();
    // Ties (err hitting exactly zero) keep the minor axis put, so a ray that
    // grazes a cell corner still crosses the wall beside it: one wall
    // shadows the full cone behind it, tangent diagonals included.
    if dx >= dy {
        let mut err = dx / 2;
        while x != to.0 {
            x += sx;
            err -= dy;
            if err < 0 {
                y += sy;
                err += dx;
            }
            if (x, y) != to && !layout.transparent(x, y) {
                return false;
            }
        }
    } else {
        let mut err = dy / 2;
        while y != to.1 {
            y += sy;
            err -= dx;
            if err < 0 {
                x += sx;
                err += dy;
            }
            if (x, y) != to && !layout.transparent(x, y) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct FishingState {
    pub x: u8,
    pub y: u8,
    pub reward_present: Vec<bool>,
    pub current_dir: Vec<Dir>,
    pub steps: u32,
}

pub struct Fishing {
    layout: FishingLayout,
    state: FishingState,
    /// Egocentric accumulated map, channel-major; the agent is always the
    /// center cell (MAP_SIDE/2, MAP_SIDE/2).
    map: Vec<f64>,
    /// 1.0 where the last step's window was visible (21×21, ego coords).
    visibility: Vec<f64>,
    /// Agent displacement applied to the map on the last step.
    last_shift: (i64, i64),
}

impl Fishing {
    pub fn new(layout: FishingLayout) -> Self {
        layout.validate().expect("invalid fishing layout");
        let state = FishingState {
            x: layout.start.0,
            y: layout.start.1,
            reward_present: vec![true; layout.rewards.len()],
            current_dir: layout.currents.iter().map(|c| c.dirs[0]).collect(),
            steps: 0,
        };
        Fishing {
            layout,
            state,
            map: vec![0.0; OBS_DIM],
            visibility: vec![0.0; MAP_CELLS],
            last_shift: (0, 0),
        }
    }

    pub fn layout(&self) -> &FishingLayout {
        &self.layout
    }

    pub fn state(&self) -> &FishingState {
        &self.state
    }

    pub fn steps(&self) -> u32 {
        self.state.steps
    }

    /// Visibility mask of the most recent observation, ego coordinates.
    pub fn last_visibility(&self) -> &[f64] {
        &self.visibility
    }

    /// Map translation applied on the most recent step (agent displacement).
    pub fn last_shift(&self) -> (i64, i64) {
        self.last_shift
    }

    /// Ground-truth channel values of a world cell right now; the oracle
    /// side of the map-consistency tests.
    pub fn world_channels(&self, x: i64, y: i64) -> [f64; CHANNELS] {
        let mut ch = [0.0; CHANNELS];
        if self.layout.cell(x, y) != CellKind::Open {
            ch[0] = 1.0;
            return ch;
        }
        let (xu, yu) = (x as u8, y as u8);
        if let Some(i) = self.layout.current_at(xu, yu) {
            ch[1 + self.state.current_dir[i] as usize] = 1.0;
        }
        if let Some(i) = self.layout.reward_at(xu, yu) {
            if self.state.reward_present[i] {
                ch[CHANNELS - 1] = 1.0;
            }
        }
        ch
    }

    fn shift_map(&mut self, dx: i64, dy: i64) {
        self.last_shift = (dx, dy);
        if dx == 0 && dy == 0 {
            return;
        }
        let side = MAP_SIDE as i64;
        let mut next = vec![0.0; OBS_DIM];
        for c in 0..CHANNELS {
            let base = c * MAP_CELLS;
            for y in 0..side {
                for x in 0..side {
                    let (sx, sy) = (x + dx, y + dy);
                    if sx >= 0 && sx < side && sy >= 0 && sy < side {
                        next[base + (y * side + x) as usize] =
                            self.map[base + (sy * side + sx) as usize];
                    }
                }
            }
        }
        self.map = next;
    }

    /// Write the currently visible window into the map and refresh the
    /// visibility mask.
    fn observe(&mut self) {
        self.visibility.iter_mut().for_each(|v| *v = 0.0);
        let center = (MAP_SIDE / 2) as i64;
        let (ax, ay) = (self.state.x as i64, self.state.y as i64);
        for oy in -VIEW..=VIEW {
            for ox in -VIEW..=VIEW {
                let (wx, wy) = (ax + ox, ay + oy);
                if !line_of_sight(&self.layout, (ax, ay), (wx, wy)) {
                    continue;
                }
                let ego = ((center + oy) * MAP_SIDE as i64 + center + ox) as usize;
                self.visibility[ego] = 1.0;
                let truth = self.world_channels(wx, wy);
                for (c, &v) in truth.iter().enumerate() {
                    self.map[c * MAP_CELLS + ego] = v;
                }
            }
        }
    }

    fn observation(&self) -> ObservationVector {
        ObservationVector(self.map.clone())
    }
}

impl Environment for Fishing {
    fn observation_dim(&self) -> usize {
        OBS_DIM
    }

    fn action_count(&self) -> usize {
        ACTION_COUNT
    }

    fn reset(&mut self, rng: &mut RngStream) -> ObservationVector {
        self.state.x = self.layout.start.0;
        self.state.y = self.layout.start.1;
        self.state.steps = 0;
        self.state.reward_present.iter_mut().for_each(|p| *p = true);
        for (d, spec) in self.state.current_dir.iter_mut().zip(&self.layout.currents) {
            *d = spec.dirs[rng.below(spec.dirs.len())];
        }
        self.map.iter_mut().for_each(|v| *v = 0.0);
        self.last_shift = (0, 0);
        self.observe();
        self.observation()
    }

    fn step(&mut self, action: Action, rng: &mut RngStream) -> Step {
        assert!(action.0 < ACTION_COUNT, "fishing has 4 actions");
        let (ox, oy) = (self.state.x as i64, self.state.y as i64);
        let (mut x, mut y) = (ox, oy);
        // Regeneration reads presence at step start: a reward collected this
        // step cannot refill until the next one.
        let absent_at_start: Vec<bool> =
            self.state.reward_present.iter().map(|&p| !p).collect();

        // Own move, unless slipping or blocked.
        if !rng.bernoulli(self.layout.slip) {
            let (dx, dy) = Dir::from_index(action.0).delta();
            if self.layout.traversable(x + dx, y + dy) {
                x += dx;
                y += dy;
            }
        }
        // Current push: one step in the current's direction, if any.
        if let Some(i) = self.layout.current_at(x as u8, y as u8) {
            let (dx, dy) = self.state.current_dir[i].delta();
            if self.layout.traversable(x + dx, y + dy) {
                x += dx;
                y += dy;
            }
        }
        self.state.x = x as u8;
        self.state.y = y as u8;

        // Collect.
        let mut reward = 0.0;
        if let Some(i) = self.layout.reward_at(self.state.x, self.state.y) {
            if self.state.reward_present[i] {
                reward = 1.0;
                self.state.reward_present[i] = false;
            }
        }

        // Stochastic events, in declaration order.
        for (i, spec) in self.layout.rewards.iter().enumerate() {
            if absent_at_start[i] && rng.bernoulli(1.0 - (-1.0 / spec.rate).exp()) {
                self.state.reward_present[i] = true;
            }
        }
        for (i, spec) in self.layout.currents.iter().enumerate() {
            if spec.dirs.len() > 1 && rng.bernoulli(1.0 - (-1.0 / spec.rate).exp()) {
                let old = self.state.current_dir[i];
                let choices: Vec<Dir> =
                    spec.dirs.iter().copied().filter(|&d| d != old).collect();
                self.state.current_dir[i] = choices[rng.below(choices.len())];
            }
        }

        self.state.steps += 1;
        self.shift_map(x - ox, y - oy);
        self.observe();
        Step { obs: self.observation(), reward, terminal: false }
    }
}
