//! Environment layouts as data.
//!
//! Every environment's geometry and rate constants load from a small
//! line-oriented text format (`#` starts a comment; the first directive must
//! be `env <kind>`). The canonical presets — `lobster`, `compass9`,
//! `rocksample_7_8`, `fishing1`, `fishing2` — are embedded below and can be
//! dumped back out for inspection or editing.

use super::fishing::{CellKind, CurrentSpec, Dir, FishingLayout, RewardSpec, WORLD};
use super::lobster::LobsterParams;
use super::rocksample::{RockSampleParams, GRID as ROCK_GRID, ROCKS};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("layout is invalid: {0}")]
    Invalid(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// A parsed layout for any environment kind.
#[derive(Clone, Debug, PartialEq)]
pub enum EnvLayout {
    Lobster(LobsterParams),
    Compass,
    RockSample { params: RockSampleParams, rocks: Option<[(u8, u8); ROCKS]> },
    Fishing(FishingLayout),
}

pub const PRESET_NAMES: [&str; 5] =
    ["lobster", "compass9", "rocksample_7_8", "fishing1", "fishing2"];

pub fn preset_text(name: &str) -> Result<&'static str, LayoutError> {
    match name {
        "lobster" => Ok(LOBSTER_PRESET),
        "compass9" => Ok(COMPASS_PRESET),
        "rocksample_7_8" => Ok(ROCKSAMPLE_PRESET),
        "fishing1" => Ok(FISHING1_PRESET),
        "fishing2" => Ok(FISHING2_PRESET),
        other => Err(LayoutError::UnknownPreset(other.to_string())),
    }
}

pub fn load_preset(name: &str) -> Result<EnvLayout, LayoutError> {
    parse(preset_text(name)?)
}

fn err(line: usize, message: impl Into<String>) -> LayoutError {
    LayoutError::Parse { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, LayoutError> {
    tok.parse().map_err(|_| err(line, format!("cannot parse {what} `{tok}`")))
}

/// Parse a layout document.
pub fn parse(text: &str) -> Result<EnvLayout, LayoutError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            lines.push((i + 1, body));
        }
    }
    let Some(&(first_no, first)) = lines.first() else {
        return Err(err(0, "empty layout"));
    };
    let mut head = first.split_whitespace();
    if head.next() != Some("env") {
        return Err(err(first_no, "layout must begin with `env <kind>`"));
    }
    let kind = head.next().ok_or_else(|| err(first_no, "missing environment kind"))?;
    let rest = &lines[1..];
    match kind {
        "lobster" => parse_lobster(rest),
        "compass" => parse_compass(rest),
        "rocksample" => parse_rocksample(rest),
        "fishing" => parse_fishing(rest),
        other => Err(err(first_no, format!("unknown environment kind `{other}`"))),
    }
}

fn parse_lobster(lines: &[(usize, &str)]) -> Result<EnvLayout, LayoutError> {
    let mut params = LobsterParams::default();
    for &(no, line) in lines {
        let mut t = line.split_whitespace();
        match t.next().unwrap() {
            "p_move" => {
                params.p_move =
                    parse_num(t.next().ok_or_else(|| err(no, "p_move needs a value"))?, no, "p_move")?
            }
            "regen_mean" => {
                params.regen_mean = parse_num(
                    t.next().ok_or_else(|| err(no, "regen_mean needs a value"))?,
                    no,
                    "regen_mean",
                )?
            }
            other => return Err(err(no, format!("unknown lobster directive `{other}`"))),
        }
    }
    if !(0.0..=1.0).contains(&params.p_move) {
        return Err(LayoutError::Invalid(format!("p_move {} outside [0,1]", params.p_move)));
    }
    if params.regen_mean <= 0.0 {
        return Err(LayoutError::Invalid("regen_mean must be positive".into()));
    }
    Ok(EnvLayout::Lobster(params))
}

fn parse_compass(lines: &[(usize, &str)]) -> Result<EnvLayout, LayoutError> {
    for &(no, line) in lines {
        let mut t = line.split_whitespace();
        match t.next().unwrap() {
            "interior" => {
                let n: usize =
                    parse_num(t.next().ok_or_else(|| err(no, "interior needs a value"))?, no, "interior")?;
                if n != super::compass::INTERIOR {
                    return Err(LayoutError::Invalid(format!(
                        "only a {0}x{0} interior is supported",
                        super::compass::INTERIOR
                    )));
                }
            }
            other => return Err(err(no, format!("unknown compass directive `{other}`"))),
        }
    }
    Ok(EnvLayout::Compass)
}

fn parse_rocksample(lines: &[(usize, &str)]) -> Result<EnvLayout, LayoutError> {
    let mut params = RockSampleParams::default();
    let mut rocks: Vec<(u8, u8)> = Vec::new();
    for &(no, line) in lines {
        let mut t = line.split_whitespace();
        match t.next().unwrap() {
            "grid" => {
                let n: usize =
                    parse_num(t.next().ok_or_else(|| err(no, "grid needs a value"))?, no, "grid")?;
                if n != ROCK_GRID {
                    return Err(LayoutError::Invalid(format!("only a {ROCK_GRID}x{ROCK_GRID} grid is supported")));
                }
            }
            "rocks" => {
                let n: usize =
                    parse_num(t.next().ok_or_else(|| err(no, "rocks needs a value"))?, no, "rocks")?;
                if n != ROCKS {
                    return Err(LayoutError::Invalid(format!("only {ROCKS} rocks are supported")));
                }
            }
            "half_efficiency" => {
                params.half_efficiency = parse_num(
                    t.next().ok_or_else(|| err(no, "half_efficiency needs a value"))?,
                    no,
                    "half_efficiency",
                )?
            }
            "rock" => {
                let x = parse_num(t.next().ok_or_else(|| err(no, "rock needs x y"))?, no, "x")?;
                let y = parse_num(t.next().ok_or_else(|| err(no, "rock needs x y"))?, no, "y")?;
                if x as usize >= ROCK_GRID || y as usize >= ROCK_GRID {
                    return Err(err(no, format!("rock ({x},{y}) outside the grid")));
                }
                rocks.push((x, y));
            }
            other => return Err(err(no, format!("unknown rocksample directive `{other}`"))),
        }
    }
    if params.half_efficiency <= 0.0 {
        return Err(LayoutError::Invalid("half_efficiency must be positive".into()));
    }
    let rocks = if rocks.is_empty() {
        None
    } else {
        if rocks.len() != ROCKS {
            return Err(LayoutError::Invalid(format!(
                "pinned rock list has {} entries, need {ROCKS}",
                rocks.len()
            )));
        }
        let mut sorted = rocks.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != ROCKS {
            return Err(LayoutError::Invalid("pinned rocks repeat a cell".into()));
        }
        let mut arr = [(0u8, 0u8); ROCKS];
        arr.copy_from_slice(&rocks);
        Some(arr)
    };
    Ok(EnvLayout::RockSample { params, rocks })
}

fn parse_dirs(tok: &str, no: usize) -> Result<Vec<Dir>, LayoutError> {
    tok.split(',')
        .map(|d| match d {
            "N" => Ok(Dir::North),
            "E" => Ok(Dir::East),
            "S" => Ok(Dir::South),
            "W" => Ok(Dir::West),
            other => Err(err(no, format!("unknown direction `{other}`"))),
        })
        .collect()
}

fn parse_fishing(lines: &[(usize, &str)]) -> Result<EnvLayout, LayoutError> {
    let mut layout = FishingLayout::empty("unnamed");
    for &(no, line) in lines {
        let mut t = line.split_whitespace();
        let word = t.next().unwrap();
        let mut coord = || -> Result<(u8, u8), LayoutError> {
            let x: u8 = parse_num(t.next().ok_or_else(|| err(no, "missing x"))?, no, "x")?;
            let y: u8 = parse_num(t.next().ok_or_else(|| err(no, "missing y"))?, no, "y")?;
            if x as usize >= WORLD || y as usize >= WORLD {
                return Err(err(no, format!("({x},{y}) outside the {WORLD}x{WORLD} grid")));
            }
            Ok((x, y))
        };
        match word {
            "name" => {
                layout.name = t.next().ok_or_else(|| err(no, "name needs a value"))?.to_string()
            }
            "start" => layout.start = coord()?,
            "slip" => {
                layout.slip =
                    parse_num(t.next().ok_or_else(|| err(no, "slip needs a value"))?, no, "slip")?
            }
            "wall" => {
                let (x, y) = coord()?;
                layout.set_cell(x, y, CellKind::Wall);
            }
            "glass" => {
                let (x, y) = coord()?;
                layout.set_cell(x, y, CellKind::Glass);
            }
            "reward" => {
                let (x, y) = coord()?;
                match (t.next(), t.next()) {
                    (Some("rate"), Some(r)) => {
                        layout.rewards.push(RewardSpec { x, y, rate: parse_num(r, no, "rate")? })
                    }
                    _ => return Err(err(no, "reward needs `x y rate <mean>`")),
                }
            }
            "current" => {
                let (x, y) = coord()?;
                let (rate, dirs) = match (t.next(), t.next(), t.next(), t.next()) {
                    (Some("rate"), Some(r), Some("dirs"), Some(d)) => {
                        (parse_num(r, no, "rate")?, parse_dirs(d, no)?)
                    }
                    _ => return Err(err(no, "current needs `x y rate <mean> dirs <list>`")),
                };
                layout.currents.push(CurrentSpec { x, y, rate, dirs });
            }
            other => return Err(err(no, format!("unknown fishing directive `{other}`"))),
        }
    }
    layout.validate().map_err(LayoutError::Invalid)?;
    Ok(EnvLayout::Fishing(layout))
}

/// Serialize a layout back to the text format; `parse(dump(x)) == x`.
pub fn dump(layout: &EnvLayout) -> String {
    let mut out = String::new();
    match layout {
        EnvLayout::Lobster(p) => {
            out.push_str("env lobster\n");
            out.push_str(&format!("p_move {}\n", p.p_move));
            out.push_str(&format!("regen_mean {}\n", p.regen_mean));
        }
        EnvLayout::Compass => {
            out.push_str("env compass\n");
            out.push_str(&format!("interior {}\n", super::compass::INTERIOR));
        }
        EnvLayout::RockSample { params, rocks } => {
            out.push_str("env rocksample\n");
            out.push_str(&format!("grid {ROCK_GRID}\n"));
            out.push_str(&format!("rocks {ROCKS}\n"));
            out.push_str(&format!("half_efficiency {}\n", params.half_efficiency));
            if let Some(rocks) = rocks {
                for (x, y) in rocks {
                    out.push_str(&format!("rock {x} {y}\n"));
                }
            }
        }
        EnvLayout::Fishing(f) => {
            out.push_str("env fishing\n");
            out.push_str(&format!("name {}\n", f.name));
            out.push_str(&format!("start {} {}\n", f.start.0, f.start.1));
            out.push_str(&format!("slip {}\n", f.slip));
            for y in 0..WORLD {
                for x in 0..WORLD {
                    match f.cells[y * WORLD + x] {
                        CellKind::Open => {}
                        CellKind::Wall => out.push_str(&format!("wall {x} {y}\n")),
                        CellKind::Glass => out.push_str(&format!("glass {x} {y}\n")),
                    }
                }
            }
            for r in &f.rewards {
                out.push_str(&format!("reward {} {} rate {}\n", r.x, r.y, r.rate));
            }
            for c in &f.currents {
                let dirs: String = c
                    .dirs
                    .iter()
                    .map(|d| d.letter().to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                out.push_str(&format!("current {} {} rate {} dirs {}\n", c.x, c.y, c.rate, dirs));
            }
        }
    }
    out
}

const LOBSTER_PRESET: &str = "\
# Three-location chain with two regenerating reward pots.
env lobster
p_move 0.6
regen_mean 10
";

const COMPASS_PRESET: &str = "\
# 9x9 walled room (7x7 interior), green goal in the middle of the west wall.
env compass
interior 7
";

const ROCKSAMPLE_PRESET: &str = "\
# 7x7 grid, 8 rocks placed per run seed, half-efficiency sensor distance 5.
env rocksample
grid 7
rocks 8
half_efficiency 5
";

const FISHING1_PRESET: &str = "\
# Fishing 1: four walled corner pockets, each with two current gateways.
# All regeneration and redirection rates are 60.
env fishing
name fishing1
start 5 5
slip 0.1
wall 3 0
wall 3 2
wall 0 3
wall 2 3
wall 7 0
wall 7 2
wall 8 3
wall 10 3
wall 3 10
wall 3 8
wall 0 7
wall 2 7
wall 7 10
wall 7 8
wall 8 7
wall 10 7
reward 1 1 rate 60
reward 9 1 rate 60
reward 1 9 rate 60
reward 9 9 rate 60
current 3 1 rate 60 dirs W,E
current 1 3 rate 60 dirs N,S
current 7 1 rate 60 dirs E,W
current 9 3 rate 60 dirs N,S
current 3 9 rate 60 dirs W,E
current 1 7 rate 60 dirs N,S
current 7 9 rate 60 dirs E,W
current 9 7 rate 60 dirs N,S
";

const FISHING2_PRESET: &str = "\
# Fishing 2: dense stochastic currents grouped by redirection rate; three
# rate-50 rewards in walled corner pockets and a rate-100 reward at (9,8)
# behind a glass tunnel whose gate currents are visible through the glass.
env fishing
name fishing2
start 5 5
slip 0.1
wall 1 1
wall 8 0
wall 9 1
wall 1 9
wall 2 10
wall 3 5
wall 3 6
wall 3 7
wall 6 6
wall 7 3
glass 8 8
glass 9 9
glass 10 9
reward 0 0 rate 50
reward 10 0 rate 50
reward 0 10 rate 50
reward 9 8 rate 100
current 0 6 rate 10 dirs N,S
current 0 7 rate 10 dirs N,S
current 2 5 rate 10 dirs E,W
current 2 6 rate 10 dirs E,W
current 4 1 rate 10 dirs N,E,S,W
current 5 7 rate 10 dirs N,S
current 5 8 rate 10 dirs N,S
current 5 10 rate 10 dirs E,W
current 8 7 rate 10 dirs S,E
current 9 7 rate 10 dirs S,E
current 1 3 rate 20 dirs N,S
current 1 4 rate 20 dirs N,S
current 7 0 rate 20 dirs E,W
current 7 1 rate 20 dirs E,W
current 8 5 rate 20 dirs E,W
current 9 5 rate 20 dirs E,W
current 10 2 rate 20 dirs N,S
current 10 3 rate 20 dirs N,S
current 10 4 rate 20 dirs N,S
current 5 2 rate 30 dirs N,S
current 5 3 rate 30 dirs N,S
current 5 4 rate 30 dirs N,S
current 0 2 rate 40 dirs N,S
current 2 0 rate 40 dirs W,E
current 2 1 rate 40 dirs W,E
current 3 9 rate 40 dirs W,E
current 3 10 rate 40 dirs W,E
current 6 2 rate 40 dirs N,S
current 6 3 rate 40 dirs N,S
current 6 4 rate 40 dirs N,S
current 9 8 rate 40 dirs S,W
current 10 8 rate 40 dirs W,N
";
