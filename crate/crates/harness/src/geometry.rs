//! Agent-state geometry export for linear Lobster agents.
//!
//! The interesting question at the home location is what the agent believes
//! about the two pots it cannot see. This module projects a trained linear
//! agent onto that two-dimensional plane: feature1 and feature2 estimate
//! P(pot 1 full) and P(pot 2 full), and each point carries the net's
//! q values for moving left and right. Two reference overlays are written
//! alongside the agent series: `ground_truth` marks the four corners of the
//! plane with optimal q values from value iteration on the underlying
//! chain, and `obs_only` marks the single point a memoryless agent
//! collapses to. Recurrent and non-linear checkpoints are not supported.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use auxrl::envs::layout::{load_preset, EnvLayout};
use auxrl::envs::lobster::{self, Lobster};
use auxrl::envs::Environment;
use auxrl::filter::spaces::LobsterBeliefSpace;
use auxrl::filter::ParticleFilter;
use auxrl::learn::linear::LinearQ;
use auxrl::learn::StateBuilder;
use auxrl::likelihood::LobsterLikelihood;
use auxrl::oracle::mdp::TabularMdp;
use auxrl::oracle::vi::value_iteration;
use auxrl::rng::RngStream;

use crate::builders::LobsterBuilder;
use crate::config::{AgentKind, EnvKind, NetKind, RunConfig};
use crate::experiment::TrainedNet;
use crate::HarnessError;

/// A trained net plus everything needed to rebuild its input pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub env: String,
    pub agent: String,
    pub net: String,
    pub input_dim: usize,
    pub action_count: usize,
    pub gamma: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub rate: f64,
    pub filter_k: usize,
    pub seed: u64,
    pub config_hash: String,
    pub params: Vec<f64>,
}

pub fn checkpoint_from_run(cfg: &RunConfig, net: &TrainedNet) -> Checkpoint {
    Checkpoint {
        env: cfg.env.name().to_string(),
        agent: cfg.agent.name().to_string(),
        net: match cfg.net {
            NetKind::Linear => "linear",
            NetKind::Mlp => "mlp",
            NetKind::Cnn => "cnn",
        }
        .to_string(),
        input_dim: net.input_dim,
        action_count: net.action_count,
        gamma: cfg.learn.gamma,
        epsilon: cfg.learn.epsilon,
        lambda: cfg.aux.lambda,
        rate: cfg.aux.rate,
        filter_k: cfg.filter_k,
        seed: cfg.seeds.first().copied().unwrap_or(0),
        config_hash: cfg.hash_hex(),
        params: net.params.clone(),
    }
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<(), HarnessError> {
    let json = serde_json::to_string_pretty(ckpt)?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub const GEOMETRY_HEADER: &str = "series,feature1,feature2,q_left,q_right";

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryRow {
    pub series: String,
    pub feature1: f64,
    pub feature2: f64,
    pub q_left: f64,
    pub q_right: f64,
}

#[derive(Debug)]
pub struct GeometrySummary {
    /// (series name, point count) in output order.
    pub series: Vec<(String, usize)>,
    pub rows: usize,
}

/// Observation at home: location one-hot plus "unobservable" for both pots.
fn home_observation() -> Vec<f64> {
    let mut o = vec![0.0; lobster::OBS_DIM];
    o[0] = 1.0;
    o[5] = 1.0;
    o[8] = 1.0;
    o
}

fn net_from(ckpt: &Checkpoint) -> Result<LinearQ, HarnessError> {
    if ckpt.params.len() != ckpt.input_dim * ckpt.action_count {
        return Err(HarnessError::Unsupported(format!(
            "checkpoint has {} params but input_dim {} x action_count {}",
            ckpt.params.len(),
            ckpt.input_dim,
            ckpt.action_count
        )));
    }
    let mut net = LinearQ::new(ckpt.input_dim, ckpt.action_count);
    net.params = ckpt.params.clone();
    Ok(net)
}

/// Marginal pot-full probabilities from a 12-state belief
/// (index = location*4 + pot1*2 + pot2).
fn pot_marginals(belief: &[f64]) -> (f64, f64) {
    let mut p1 = 0.0;
    let mut p2 = 0.0;
    for (i, b) in belief.iter().enumerate() {
        if (i / 2) % 2 == 1 {
            p1 += b;
        }
        if i % 2 == 1 {
            p2 += b;
        }
    }
    (p1, p2)
}

/// Decay ladder {0} ∪ {λ^k : λ^k >= 1e-3}, ascending. These are exactly the
/// values a reset-type trace can take between observations.
fn trace_grid(lambda: f64) -> Vec<f64> {
    let mut values = vec![0.0];
    let mut m = 1.0;
    while m >= 1e-3 && values.len() < 400 {
        values.push(m);
        m *= lambda;
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

fn greedy_eps(net: &LinearQ, x: &[f64], epsilon: f64, rng: &mut RngStream) -> usize {
    if rng.bernoulli(epsilon) {
        return rng.below(net.actions);
    }
    let q = net.q_values(x);
    let mut best = 0;
    for a in 1..q.len() {
        if q[a] > q[best] {
            best = a;
        }
    }
    best
}

const ROLLOUT_VISIT_CAP: usize = 2000;
const ROLLOUT_STEP_CAP: u64 = 200_000;

/// Collect (feature1, feature2, q) points at the home location by running
/// the checkpointed policy. The aux features live inside the emitted agent
/// state, so they are read straight out of `x`.
fn rollout_points(
    ckpt: &Checkpoint,
    net: &LinearQ,
    mut builder: LobsterBuilder,
    features_of: impl Fn(&[f64]) -> (f64, f64),
) -> Vec<GeometryRow> {
    let EnvLayout::Lobster(params) = load_preset("lobster").expect("lobster preset") else {
        unreachable!("lobster preset is a lobster layout");
    };
    let mut env = Lobster::new(params);
    let root = RngStream::from_seed(ckpt.seed);
    let mut env_rng = root.fork("geometry-env");
    let mut aux_rng = root.fork("geometry-aux");
    let mut act_rng = root.fork("geometry-act");

    let mut rows = Vec::new();
    let obs = env.reset(&mut env_rng);
    let mut x = builder.on_reset(&env, &obs, &mut aux_rng);
    for step in 1..=ROLLOUT_STEP_CAP {
        if env.state().location == 0 {
            let (f1, f2) = features_of(x.as_slice());
            let q = net.q_values(x.as_slice());
            rows.push(GeometryRow {
                series: ckpt.agent.clone(),
                feature1: f1,
                feature2: f2,
                q_left: q[lobster::LEFT.0],
                q_right: q[lobster::RIGHT.0],
            });
            if rows.len() >= ROLLOUT_VISIT_CAP {
                break;
            }
        }
        let a = auxrl::state::Action(greedy_eps(net, x.as_slice(), ckpt.epsilon, &mut act_rng));
        let out = env.step(a, &mut env_rng);
        x = builder.on_step(&env, a, &out.obs, &mut aux_rng);
        // Same episode boundary as training: fresh start every 200 steps.
        if step % 200 == 0 {
            let obs = env.reset(&mut env_rng);
            x = builder.on_reset(&env, &obs, &mut aux_rng);
        }
    }
    rows
}

fn agent_series(ckpt: &Checkpoint, net: &LinearQ) -> Result<Vec<GeometryRow>, HarnessError> {
    let EnvLayout::Lobster(params) = load_preset("lobster")? else {
        return Err(HarnessError::Unsupported("lobster preset is not a lobster layout".into()));
    };
    let home = home_observation();
    match ckpt.agent.as_str() {
        "obs-only" => {
            let q = net.q_values(&home);
            Ok(vec![GeometryRow {
                series: ckpt.agent.clone(),
                feature1: 0.0,
                feature2: 0.0,
                q_left: q[lobster::LEFT.0],
                q_right: q[lobster::RIGHT.0],
            }])
        }
        "trace" => {
            // Enumerate the reachable trace values instead of rolling out:
            // the plane is a finite lattice. m = 1 means "just saw the pot
            // empty", so the exported feature is the complement 1 - m.
            let grid = trace_grid(ckpt.lambda);
            let mut rows = Vec::with_capacity(grid.len() * grid.len());
            for &m1 in &grid {
                for &m2 in &grid {
                    let mut x = home.clone();
                    x.push(m1);
                    x.push(m2);
                    let q = net.q_values(&x);
                    rows.push(GeometryRow {
                        series: ckpt.agent.clone(),
                        feature1: 1.0 - m1,
                        feature2: 1.0 - m2,
                        q_left: q[lobster::LEFT.0],
                        q_right: q[lobster::RIGHT.0],
                    });
                }
            }
            Ok(rows)
        }
        "pf" => {
            let space = LobsterBeliefSpace::new(params);
            let root = RngStream::from_seed(ckpt.seed);
            let mut init_rng = root.fork("geometry-filter");
            let filter = ParticleFilter::new(space, ckpt.filter_k, &mut init_rng)
                .map_err(HarnessError::Filter)?;
            Ok(rollout_points(ckpt, net, LobsterBuilder::Pf(filter), |x| pot_marginals(x)))
        }
        "likelihood" => {
            let pred = LobsterLikelihood::new(ckpt.rate, params.p_move);
            Ok(rollout_points(ckpt, net, LobsterBuilder::Likelihood(pred), |x| {
                (x[lobster::OBS_DIM], x[lobster::OBS_DIM + 1])
            }))
        }
        other => Err(HarnessError::Unsupported(format!(
            "geometry export works on obs-only, trace, pf and likelihood agents, not `{other}`"
        ))),
    }
}

/// Optimal q values at the four fully-known home states.
fn ground_truth_corners(gamma: f64) -> Result<Vec<GeometryRow>, HarnessError> {
    let EnvLayout::Lobster(params) = load_preset("lobster")? else {
        return Err(HarnessError::Unsupported("lobster preset is not a lobster layout".into()));
    };
    let model = lobster::LobsterModel::new(params);
    let mdp = TabularMdp::from_model(&model, gamma)?;
    let sol = value_iteration(&mdp, 1e-12)?;
    let mut rows = Vec::with_capacity(4);
    for f1 in 0..2usize {
        for f2 in 0..2usize {
            let state = f1 * 2 + f2; // location 0, pots (f1, f2)
            rows.push(GeometryRow {
                series: "ground_truth".to_string(),
                feature1: f1 as f64,
                feature2: f2 as f64,
                q_left: mdp.q_value(state, lobster::LEFT.0, &sol.values),
                q_right: mdp.q_value(state, lobster::RIGHT.0, &sol.values),
            });
        }
    }
    Ok(rows)
}

/// Scale both q columns jointly onto [0, 1]. A shared positive-scale affine
/// map keeps the sign of every q_left - q_right difference.
fn normalize_q(rows: &mut [GeometryRow]) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in rows.iter() {
        lo = lo.min(r.q_left).min(r.q_right);
        hi = hi.max(r.q_left).max(r.q_right);
    }
    if !lo.is_finite() || hi <= lo {
        for r in rows.iter_mut() {
            r.q_left = 0.5;
            r.q_right = 0.5;
        }
        return;
    }
    let scale = 1.0 / (hi - lo);
    for r in rows.iter_mut() {
        r.q_left = (r.q_left - lo) * scale;
        r.q_right = (r.q_right - lo) * scale;
    }
}

pub fn export_rows(ckpt: &Checkpoint) -> Result<Vec<GeometryRow>, HarnessError> {
    if ckpt.env != EnvKind::Lobster.name() {
        return Err(HarnessError::Unsupported(format!(
            "geometry export is defined for the lobster environment, not `{}`",
            ckpt.env
        )));
    }
    if ckpt.net != "linear" {
        return Err(HarnessError::Unsupported(format!(
            "geometry export needs a linear checkpoint, got `{}`",
            ckpt.net
        )));
    }
    if ckpt.agent == AgentKind::Lstm.name() || ckpt.agent == AgentKind::GroundTruth.name() {
        return Err(HarnessError::Unsupported(format!(
            "geometry export does not support `{}` agents",
            ckpt.agent
        )));
    }
    let net = net_from(ckpt)?;
    let mut rows = agent_series(ckpt, &net)?;
    rows.extend(ground_truth_corners(ckpt.gamma)?);
    // A memoryless agent sees the same thing on every home visit: its
    // whole plane is one point with no left/right preference.
    rows.push(GeometryRow {
        series: "obs_only".to_string(),
        feature1: 0.0,
        feature2: 0.0,
        q_left: 0.0,
        q_right: 0.0,
    });
    normalize_q(&mut rows);
    Ok(rows)
}

pub fn export(ckpt_path: &Path, out_path: &Path) -> Result<GeometrySummary, HarnessError> {
    let ckpt = load_checkpoint(ckpt_path)?;
    let rows = export_rows(&ckpt)?;
    let mut text = String::from(GEOMETRY_HEADER);
    text.push('\n');
    let mut series: Vec<(String, usize)> = Vec::new();
    for r in &rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            r.series, r.feature1, r.feature2, r.q_left, r.q_right
        );
        match series.last_mut() {
            Some((name, count)) if *name == r.series => *count += 1,
            _ => series.push((r.series.clone(), 1)),
        }
    }
    std::fs::write(out_path, text)?;
    Ok(GeometrySummary { series, rows: rows.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_checkpoint(params: Vec<f64>) -> Checkpoint {
        Checkpoint {
            env: "lobster".into(),
            agent: "trace".into(),
            net: "linear".into(),
            input_dim: 11,
            action_count: 3,
            gamma: 0.9,
            epsilon: 0.1,
            lambda: 0.9,
            rate: 0.1,
            filter_k: 100,
            seed: 7,
            config_hash: "deadbeefdeadbeef".into(),
            params,
        }
    }

    #[test]
    fn trace_grid_spans_zero_to_one() {
        let grid = trace_grid(0.9);
        assert_eq!(grid.first(), Some(&0.0));
        assert_eq!(grid.last(), Some(&1.0));
        assert!(grid.len() > 50);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(grid.iter().all(|&m| m == 0.0 || m >= 1e-3));
    }

    #[test]
    fn overlays_have_the_required_shape() {
        let ckpt = trace_checkpoint(vec![0.0; 33]);
        let rows = export_rows(&ckpt).unwrap();
        let gt: Vec<&GeometryRow> =
            rows.iter().filter(|r| r.series == "ground_truth").collect();
        assert_eq!(gt.len(), 4);
        let mut corners: Vec<(u8, u8)> =
            gt.iter().map(|r| (r.feature1 as u8, r.feature2 as u8)).collect();
        corners.sort_unstable();
        assert_eq!(corners, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let obs: Vec<&GeometryRow> = rows.iter().filter(|r| r.series == "obs_only").collect();
        assert_eq!(obs.len(), 1);
        assert_eq!((obs[0].feature1, obs[0].feature2), (0.0, 0.0));
        // Both pots full makes collecting reachable either way; left/right
        // q values at the (1,1) corner should both beat the (0,0) corner.
        let q = |f1: f64, f2: f64| {
            gt.iter().find(|r| r.feature1 == f1 && r.feature2 == f2).unwrap().q_left
        };
        assert!(q(1.0, 1.0) > q(0.0, 0.0));
    }

    #[test]
    fn q_normalization_is_joint_and_sign_preserving() {
        let mut params = vec![0.0; 33];
        // Left row weight on m1, right row weight on m2.
        params[9] = 2.0;
        params[11 + 10] = 4.0;
        let ckpt = trace_checkpoint(params);
        let rows = export_rows(&ckpt).unwrap();
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.q_left) && (0.0..=1.0).contains(&r.q_right));
        }
        // m1=1, m2=0 (exported corner (0,1)): raw q_left=2 > q_right=0.
        let corner = rows
            .iter()
            .find(|r| r.series == "trace" && r.feature1 == 0.0 && r.feature2 == 1.0)
            .unwrap();
        assert!(corner.q_left > corner.q_right);
        // m1=0, m2=1 (exported (1,0)): raw q_right=4 > q_left=0.
        let other = rows
            .iter()
            .find(|r| r.series == "trace" && r.feature1 == 1.0 && r.feature2 == 0.0)
            .unwrap();
        assert!(other.q_right > other.q_left);
    }

    #[test]
    fn rollout_agents_stay_on_the_unit_square() {
        let ckpt = Checkpoint {
            agent: "pf".into(),
            input_dim: 12,
            params: vec![0.0; 36],
            filter_k: 50,
            ..trace_checkpoint(vec![])
        };
        let rows = export_rows(&ckpt).unwrap();
        let pf: Vec<&GeometryRow> = rows.iter().filter(|r| r.series == "pf").collect();
        assert!(!pf.is_empty() && pf.len() <= ROLLOUT_VISIT_CAP);
        for r in pf {
            assert!((0.0..=1.0 + 1e-9).contains(&r.feature1));
            assert!((0.0..=1.0 + 1e-9).contains(&r.feature2));
        }
    }

    #[test]
    fn unsupported_checkpoints_are_refused() {
        let mut mlp = trace_checkpoint(vec![0.0; 33]);
        mlp.net = "mlp".into();
        assert!(matches!(export_rows(&mlp), Err(HarnessError::Unsupported(_))));
        let mut compass = trace_checkpoint(vec![0.0; 33]);
        compass.env = "compass".into();
        assert!(matches!(export_rows(&compass), Err(HarnessError::Unsupported(_))));
        let mut lstm = trace_checkpoint(vec![0.0; 33]);
        lstm.agent = "lstm".into();
        assert!(matches!(export_rows(&lstm), Err(HarnessError::Unsupported(_))));
    }

    #[test]
    fn checkpoint_json_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("agent.json");
        let ckpt = trace_checkpoint(vec![1.5, -0.25, 0.0]);
        save_checkpoint(&path, &ckpt).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back.params, ckpt.params);
        assert_eq!(back.agent, ckpt.agent);
        assert_eq!(back.seed, ckpt.seed);
    }
}
