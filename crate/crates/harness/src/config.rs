//! Run configuration.
//!
//! Configs are flat `key = value` text. Every key has an environment- and
//! scale-dependent default, so a minimal file is just `env` and `agent`;
//! explicit keys always win over profile defaults. The resolved config is
//! what gets hashed (FNV-1a over the canonical dump), so two files that
//! resolve to the same run share a hash regardless of formatting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EnvKind {
    Lobster,
    Compass,
    RockSample,
    Fishing1,
    Fishing2,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Lobster => "lobster",
            EnvKind::Compass => "compass",
            EnvKind::RockSample => "rocksample",
            EnvKind::Fishing1 => "fishing1",
            EnvKind::Fishing2 => "fishing2",
        }
    }

    pub fn is_fishing(self) -> bool {
        matches!(self, EnvKind::Fishing1 | EnvKind::Fishing2)
    }
}

impl FromStr for EnvKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lobster" => Ok(EnvKind::Lobster),
            "compass" => Ok(EnvKind::Compass),
            "rocksample" => Ok(EnvKind::RockSample),
            "fishing1" => Ok(EnvKind::Fishing1),
            "fishing2" => Ok(EnvKind::Fishing2),
            other => Err(format!("unknown env `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AgentKind {
    ObsOnly,
    Trace,
    Pf,
    Likelihood,
    Lstm,
    TraceLstm,
    GroundTruth,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::ObsOnly => "obs-only",
            AgentKind::Trace => "trace",
            AgentKind::Pf => "pf",
            AgentKind::Likelihood => "likelihood",
            AgentKind::Lstm => "lstm",
            AgentKind::TraceLstm => "trace+lstm",
            AgentKind::GroundTruth => "ground-truth",
        }
    }

    pub fn is_recurrent(self) -> bool {
        matches!(self, AgentKind::Lstm | AgentKind::TraceLstm)
    }
}

impl FromStr for AgentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "obs-only" => Ok(AgentKind::ObsOnly),
            "trace" => Ok(AgentKind::Trace),
            "pf" => Ok(AgentKind::Pf),
            "likelihood" => Ok(AgentKind::Likelihood),
            "lstm" => Ok(AgentKind::Lstm),
            "trace+lstm" => Ok(AgentKind::TraceLstm),
            "ground-truth" => Ok(AgentKind::GroundTruth),
            other => Err(format!("unknown agent `{other}`")),
        }
    }
}

/// Feedforward architecture. Recurrent agents carry their own cell and
/// ignore this; `Cnn` is only valid on the Fishing map input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetKind {
    Linear,
    Mlp,
    Cnn,
}

impl NetKind {
    pub fn name(self) -> &'static str {
        match self {
            NetKind::Linear => "linear",
            NetKind::Mlp => "mlp",
            NetKind::Cnn => "cnn",
        }
    }
}

impl FromStr for NetKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" => Ok(NetKind::Linear),
            "mlp" => Ok(NetKind::Mlp),
            "cnn" => Ok(NetKind::Cnn),
            other => Err(format!("unknown net `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Adam => "adam",
            OptimizerKind::Sgd => "sgd",
        }
    }
}

impl FromStr for OptimizerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "adam" => Ok(OptimizerKind::Adam),
            "sgd" => Ok(OptimizerKind::Sgd),
            other => Err(format!("unknown optimizer `{other}`")),
        }
    }
}

/// Step budgets and a few capacity knobs differ between the reduced `desk`
/// profile (runs on one core in minutes) and the appendix-faithful `paper`
/// profile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

impl FromStr for Scale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            other => Err(format!("unknown scale `{other}` (want desk|paper)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnKeys {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub buffer: usize,
    pub truncation: usize,
    pub hidden: usize,
    pub batch: usize,
    pub fp: u8,
    pub update_every: u64,
    pub optimizer: OptimizerKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxKeys {
    pub lambda: f64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalKeys {
    pub every: u64,
    pub episodes: usize,
}

/// A fully resolved run: env, agent, architecture, seeds and all numeric
/// knobs. Produced by [`resolve`]; hash it with [`RunConfig::hash_hex`].
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub env: EnvKind,
    pub agent: AgentKind,
    pub net: NetKind,
    pub seeds: Vec<u64>,
    pub steps: u64,
    pub episode_cap: u64,
    pub learn: LearnKeys,
    pub aux: AuxKeys,
    pub filter_k: usize,
    pub eval: EvalKeys,
    /// Fishing input pooling: channel-wise average over `pool × pool` tiles
    /// (1 keeps the raw 21×21 map).
    pub map_pool: usize,
}

impl RunConfig {
    /// Canonical dump: one sorted `key = value` line per resolved key.
    /// This text is the identity of the run.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("agent", self.agent.name().to_string());
        put("aux.lambda", self.aux.lambda.to_string());
        put("aux.rate", self.aux.rate.to_string());
        put("env", self.env.name().to_string());
        put("episode.cap", self.episode_cap.to_string());
        put("eval.episodes", self.eval.episodes.to_string());
        put("eval.every", self.eval.every.to_string());
        put("filter.k", self.filter_k.to_string());
        put("learn.alpha", self.learn.alpha.to_string());
        put("learn.batch", self.learn.batch.to_string());
        put("learn.buffer", self.learn.buffer.to_string());
        put("learn.epsilon", self.learn.epsilon.to_string());
        put("learn.fp", self.learn.fp.to_string());
        put("learn.gamma", self.learn.gamma.to_string());
        put("learn.hidden", self.learn.hidden.to_string());
        put("learn.optimizer", self.learn.optimizer.name().to_string());
        put("learn.truncation", self.learn.truncation.to_string());
        put("learn.update_every", self.learn.update_every.to_string());
        put("map.pool", self.map_pool.to_string());
        put("net", self.net.name().to_string());
        put(
            "seeds",
            self.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
        );
        put("steps", self.steps.to_string());
        out
    }

    pub fn hash_hex(&self) -> String {
        format!("{:016x}", fnv1a(self.canonical().as_bytes()))
    }

    /// Short tag for file names: `env_agent_hash8`.
    pub fn tag(&self) -> String {
        let agent = self.agent.name().replace('+', "-");
        format!("{}_{}_{}", self.env.name(), agent, &self.hash_hex()[..8])
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Key-value text parsed but not yet resolved against profile defaults.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    pub entries: BTreeMap<String, String>,
}

const KNOWN_KEYS: [&str; 20] = [
    "agent",
    "aux.lambda",
    "aux.rate",
    "env",
    "episode.cap",
    "eval.episodes",
    "eval.every",
    "filter.k",
    "learn.alpha",
    "learn.batch",
    "learn.buffer",
    "learn.epsilon",
    "learn.fp",
    "learn.gamma",
    "learn.hidden",
    "learn.optimizer",
    "learn.truncation",
    "learn.update_every",
    "map.pool",
    "net",
];

/// Parse flat `key = value` text. `#` starts a comment; blank lines are
/// skipped; keys may not repeat. `sweep.*` keys are accepted here and
/// interpreted by the sweep module.
pub fn parse(text: &str) -> Result<RawConfig, ConfigError> {
    let mut entries = BTreeMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let known = KNOWN_KEYS.contains(&key.as_str())
            || key == "seeds"
            || key == "steps"
            || key.starts_with("sweep.");
        if !known {
            return Err(ConfigError::UnknownKey(key));
        }
        if entries.insert(key.clone(), value).is_some() {
            return Err(ConfigError::Parse { line, message: format!("key `{key}` repeats") });
        }
    }
    Ok(RawConfig { entries })
}

impl RawConfig {
    fn take<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v.parse::<T>().map(Some).map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: v.clone(),
            }),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.take(key)?.ok_or_else(|| ConfigError::Missing(key.to_string()))
    }
}

/// `0..30` (half-open) or a comma list `0,4,7`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| format!("bad range start `{lo}`"))?;
        let hi: u64 = hi.trim().parse().map_err(|_| format!("bad range end `{hi}`"))?;
        if hi <= lo {
            return Err(format!("empty seed range `{text}`"));
        }
        return Ok((lo..hi).collect());
    }
    let mut seeds = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        seeds.push(tok.parse().map_err(|_| format!("bad seed `{tok}`"))?);
    }
    if seeds.is_empty() {
        return Err("no seeds given".to_string());
    }
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}

struct Profile {
    steps: u64,
    episode_cap: u64,
    gamma: f64,
    alpha: f64,
    lambda: f64,
    net: NetKind,
    hidden: usize,
    truncation: usize,
    buffer: usize,
    update_every: u64,
    filter_k: usize,
    eval_every: u64,
    seed_count: u64,
    map_pool: usize,
}

fn profile(env: EnvKind, agent: AgentKind, scale: Scale) -> Profile {
    let desk = scale == Scale::Desk;
    let mut p = match env {
        EnvKind::Lobster => Profile {
            steps: 250_000,
            episode_cap: 200,
            gamma: 0.9,
            alpha: 1e-3,
            lambda: 0.9,
            net: NetKind::Linear,
            hidden: 100,
            truncation: if desk { 5 } else { 10 },
            buffer: 10_000,
            update_every: 1,
            filter_k: 100,
            eval_every: 2_000,
            seed_count: 30,
            map_pool: 1,
        },
        EnvKind::Compass => Profile {
            steps: if desk { 300_000 } else { 1_000_000 },
            episode_cap: 1_000,
            gamma: 0.9,
            alpha: 1e-4,
            lambda: 0.9,
            net: NetKind::Mlp,
            hidden: if desk && agent.is_recurrent() { 32 } else { 100 },
            truncation: if desk { 5 } else { 10 },
            buffer: 10_000,
            update_every: 1,
            // One particle per possible start state; the belief space
            // enumerates them, so this k is just the request floor.
            filter_k: 196,
            eval_every: 2_000,
            seed_count: 10,
            map_pool: 1,
        },
        EnvKind::RockSample => Profile {
            steps: if desk { 500_000 } else { 1_500_000 },
            episode_cap: 1_000,
            gamma: 0.99,
            alpha: 1e-3,
            lambda: 0.9,
            net: NetKind::Mlp,
            hidden: if desk && agent.is_recurrent() { 32 } else { 100 },
            truncation: if desk { 5 } else { 10 },
            buffer: if desk { 10_000 } else { 100_000 },
            update_every: 4,
            filter_k: 100,
            eval_every: 2_000,
            seed_count: 10,
            map_pool: 1,
        },
        EnvKind::Fishing1 => Profile {
            steps: if desk { 200_000 } else { 2_000_000 },
            episode_cap: 1_000,
            gamma: 0.99,
            alpha: 1e-4,
            lambda: 0.95,
            net: if desk { NetKind::Mlp } else { NetKind::Cnn },
            hidden: 64,
            truncation: if desk { 5 } else { 10 },
            buffer: if desk { 50_000 } else { 100_000 },
            update_every: 8,
            filter_k: 100,
            eval_every: 2_000,
            seed_count: 5,
            map_pool: if desk { 3 } else { 1 },
        },
        EnvKind::Fishing2 => Profile {
            steps: if desk { 200_000 } else { 12_000_000 },
            episode_cap: 1_000,
            gamma: 0.99,
            alpha: 1e-4,
            lambda: 0.95,
            net: if desk { NetKind::Mlp } else { NetKind::Cnn },
            hidden: 64,
            truncation: if desk { 5 } else { 10 },
            buffer: if desk { 50_000 } else { 100_000 },
            update_every: 8,
            filter_k: 100,
            eval_every: if desk { 2_000 } else { 10_000 },
            seed_count: 5,
            map_pool: if desk { 3 } else { 1 },
        },
    };
    if agent == AgentKind::Lstm || agent == AgentKind::TraceLstm {
        // Recurrent value functions train noticeably slower; the appendix
        // grids bottom out an order below the feedforward picks.
        p.alpha = p.alpha.min(1e-4);
    }
    p
}

fn supported(env: EnvKind, agent: AgentKind) -> bool {
    use AgentKind::*;
    match env {
        EnvKind::Lobster => matches!(agent, ObsOnly | Trace | Pf | Likelihood | GroundTruth | Lstm),
        EnvKind::Compass | EnvKind::RockSample => matches!(agent, ObsOnly | Pf | GroundTruth | Lstm),
        EnvKind::Fishing1 | EnvKind::Fishing2 => matches!(agent, ObsOnly | Trace | Lstm | TraceLstm),
    }
}

/// Resolve raw text against the profile for (env, agent, scale): every key
/// gets a value, explicit keys win, the combination is validated.
pub fn resolve(raw: &RawConfig, scale: Scale) -> Result<RunConfig, ConfigError> {
    let env: EnvKind = raw.required("env")?;
    let agent: AgentKind = raw.required("agent")?;
    if !supported(env, agent) {
        return Err(ConfigError::Unsupported(format!(
            "agent `{}` is not defined for env `{}`",
            agent.name(),
            env.name()
        )));
    }
    let p = profile(env, agent, scale);

    let net = raw.take::<NetKind>("net")?.unwrap_or(p.net);
    if agent.is_recurrent() && net == NetKind::Cnn {
        return Err(ConfigError::Unsupported(
            "a convolutional recurrent cell is not implemented; recurrent agents use the \
             flat-input cell (pool the map instead)"
                .to_string(),
        ));
    }
    if net == NetKind::Cnn && !env.is_fishing() {
        return Err(ConfigError::Unsupported(format!(
            "net `cnn` expects the fishing map input, not env `{}`",
            env.name()
        )));
    }

    let seeds = match raw.entries.get("seeds") {
        Some(text) => parse_seeds(text).map_err(|e| ConfigError::BadValue {
            key: "seeds".to_string(),
            value: e,
        })?,
        None => (0..p.seed_count).collect(),
    };

    let fp: u8 = raw.take("learn.fp")?.unwrap_or(64);
    if fp != 32 && fp != 64 {
        return Err(ConfigError::BadValue { key: "learn.fp".into(), value: fp.to_string() });
    }

    let map_pool: usize = raw.take("map.pool")?.unwrap_or(p.map_pool);
    if env.is_fishing() && !(map_pool == 1 || 21 % map_pool == 0) {
        return Err(ConfigError::BadValue {
            key: "map.pool".into(),
            value: format!("{map_pool} does not tile the 21-cell map"),
        });
    }
    if net == NetKind::Cnn && map_pool != 1 {
        return Err(ConfigError::Unsupported(
            "net `cnn` consumes the raw map; set map.pool = 1".to_string(),
        ));
    }

    let cfg = RunConfig {
        env,
        agent,
        net,
        seeds,
        steps: raw.take("steps")?.unwrap_or(p.steps),
        episode_cap: raw.take("episode.cap")?.unwrap_or(p.episode_cap),
        learn: LearnKeys {
            alpha: raw.take("learn.alpha")?.unwrap_or(p.alpha),
            gamma: raw.take("learn.gamma")?.unwrap_or(p.gamma),
            epsilon: raw.take("learn.epsilon")?.unwrap_or(0.1),
            buffer: raw.take("learn.buffer")?.unwrap_or(p.buffer),
            truncation: raw.take("learn.truncation")?.unwrap_or(p.truncation),
            hidden: raw.take("learn.hidden")?.unwrap_or(p.hidden),
            batch: raw.take("learn.batch")?.unwrap_or(64),
            fp,
            update_every: raw.take("learn.update_every")?.unwrap_or(p.update_every),
            optimizer: raw.take("learn.optimizer")?.unwrap_or(OptimizerKind::Adam),
        },
        aux: AuxKeys {
            lambda: raw.take("aux.lambda")?.unwrap_or(p.lambda),
            rate: raw.take("aux.rate")?.unwrap_or(0.1),
        },
        filter_k: raw.take("filter.k")?.unwrap_or(p.filter_k),
        eval: EvalKeys {
            every: raw.take("eval.every")?.unwrap_or(p.eval_every),
            episodes: raw.take("eval.episodes")?.unwrap_or(5),
        },
        map_pool,
    };

    if cfg.learn.truncation == 0 || cfg.learn.batch == 0 || cfg.learn.update_every == 0 {
        return Err(ConfigError::Unsupported(
            "learn.truncation, learn.batch and learn.update_every must be ≥ 1".to_string(),
        ));
    }
    if cfg.filter_k == 0 && agent == AgentKind::Pf {
        return Err(ConfigError::Unsupported("filter.k must be ≥ 1 for pf agents".to_string()));
    }
    Ok(cfg)
}

pub fn load(text: &str, scale: Scale) -> Result<RunConfig, ConfigError> {
    let raw = parse(text)?;
    for key in raw.entries.keys() {
        if key.starts_with("sweep.") {
            return Err(ConfigError::Unsupported(format!(
                "`{key}`: sweep keys belong in a sweep grid, not a run config"
            )));
        }
    }
    resolve(&raw, scale)
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_profile_defaults() {
        let cfg = load("env = lobster\nagent = trace\n", Scale::Desk).unwrap();
        assert_eq!(cfg.steps, 250_000);
        assert_eq!(cfg.episode_cap, 200);
        assert_eq!(cfg.learn.gamma, 0.9);
        assert_eq!(cfg.learn.alpha, 1e-3);
        assert_eq!(cfg.aux.lambda, 0.9);
        assert_eq!(cfg.net, NetKind::Linear);
        assert_eq!(cfg.seeds.len(), 30);
        assert_eq!(cfg.learn.optimizer, OptimizerKind::Adam);
    }

    #[test]
    fn explicit_keys_override_the_profile() {
        let text = "env = compass\nagent = pf\nsteps = 1234\nlearn.alpha = 5e-4\nseeds = 3,1,3\n";
        let cfg = load(text, Scale::Desk).unwrap();
        assert_eq!(cfg.steps, 1234);
        assert_eq!(cfg.learn.alpha, 5e-4);
        assert_eq!(cfg.seeds, vec![1, 3], "seeds sort and dedup");
    }

    #[test]
    fn scale_switches_step_budgets() {
        let desk = load("env = compass\nagent = pf\n", Scale::Desk).unwrap();
        let paper = load("env = compass\nagent = pf\n", Scale::Paper).unwrap();
        assert_eq!(desk.steps, 300_000);
        assert_eq!(paper.steps, 1_000_000);
        let f2 = load("env = fishing2\nagent = trace\n", Scale::Paper).unwrap();
        assert_eq!(f2.steps, 12_000_000);
        assert_eq!(f2.eval.every, 10_000);
        assert_eq!(f2.net, NetKind::Cnn);
    }

    #[test]
    fn unsupported_pairs_are_rejected() {
        for (env, agent) in [
            ("compass", "likelihood"),
            ("compass", "trace"),
            ("rocksample", "trace"),
            ("fishing1", "pf"),
            ("fishing1", "likelihood"),
            ("fishing1", "ground-truth"),
            ("lobster", "trace+lstm"),
        ] {
            let text = format!("env = {env}\nagent = {agent}\n");
            assert!(
                matches!(load(&text, Scale::Desk), Err(ConfigError::Unsupported(_))),
                "{env}/{agent} should be rejected"
            );
        }
    }

    #[test]
    fn unknown_and_repeated_keys_fail() {
        assert!(matches!(
            parse("env = lobster\nlearn.alpa = 3\n"),
            Err(ConfigError::UnknownKey(k)) if k == "learn.alpa"
        ));
        assert!(matches!(
            parse("env = lobster\nenv = compass\n"),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn hash_ignores_formatting_but_not_values() {
        let a = load("env = lobster\nagent = pf\n", Scale::Desk).unwrap();
        let b = load("# comment\n  env   =   lobster\nagent = pf\n", Scale::Desk).unwrap();
        assert_eq!(a.hash_hex(), b.hash_hex());
        let c = load("env = lobster\nagent = pf\nfilter.k = 101\n", Scale::Desk).unwrap();
        assert_ne!(a.hash_hex(), c.hash_hex());
    }

    #[test]
    fn seed_ranges_parse_half_open() {
        assert_eq!(parse_seeds("0..4").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert!(parse_seeds("4..4").is_err());
    }

    #[test]
    fn cnn_is_fishing_only_and_needs_the_raw_map() {
        let bad_env = load("env = compass\nagent = obs-only\nnet = cnn\n", Scale::Desk);
        assert!(matches!(bad_env, Err(ConfigError::Unsupported(_))));
        let pooled = load("env = fishing1\nagent = obs-only\nnet = cnn\n", Scale::Desk);
        assert!(matches!(pooled, Err(ConfigError::Unsupported(_))), "desk pools by default");
        let ok = load("env = fishing1\nagent = obs-only\nnet = cnn\nmap.pool = 1\n", Scale::Desk);
        assert!(ok.is_ok());
    }
}
