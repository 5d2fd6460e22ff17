//! Agent-state builders: one per (environment, agent kind) pair.
//!
//! Each builder implements [`StateBuilder`] for its concrete environment and
//! owns whatever recursion the agent kind needs — nothing for raw
//! observations, a decaying trace, a particle filter, or the hand-derived
//! likelihood predictor. Recurrent agents get the previous action appended
//! as a one-hot; the network carries the rest of the history itself.

use auxrl::envs::compass::{self, Compass};
use auxrl::envs::fishing::{Fishing, CHANNELS, MAP_SIDE};
use auxrl::envs::lobster::{self, Lobster};
use auxrl::envs::rocksample::{RockSample, GRID, ROCKS};
use auxrl::envs::Environment;
use auxrl::filter::spaces::{
    quality_marginals, CompassBeliefSpace, LobsterBeliefSpace, RockBeliefSpace,
};
use auxrl::filter::ParticleFilter;
use auxrl::learn::cnn::avg_pool_channels;
use auxrl::learn::StateBuilder;
use auxrl::likelihood::LobsterLikelihood;
use auxrl::trace::{LobsterRewardTrace, MapTrace};
use auxrl::{Action, AgentStateVector, ObservationVector, RngStream};

fn one_hot_into(out: &mut Vec<f64>, index: Option<usize>, width: usize) {
    let base = out.len();
    out.resize(base + width, 0.0);
    if let Some(i) = index {
        out[base + i] = 1.0;
    }
}

pub enum LobsterBuilder {
    Obs,
    Trace(LobsterRewardTrace),
    Pf(ParticleFilter<LobsterBeliefSpace>),
    Likelihood(LobsterLikelihood),
    Lstm,
}

impl LobsterBuilder {
    pub fn depletions(&self) -> Option<u64> {
        match self {
            LobsterBuilder::Pf(f) => Some(f.depletion_resets()),
            _ => None,
        }
    }

    fn emit(&mut self, obs: &ObservationVector, action: Option<Action>) -> AgentStateVector {
        let mut x = Vec::with_capacity(self.dim());
        match self {
            LobsterBuilder::Obs => x.extend_from_slice(obs.as_slice()),
            LobsterBuilder::Trace(trace) => {
                trace.update(obs.as_slice());
                x.extend_from_slice(obs.as_slice());
                x.extend_from_slice(&trace.values());
            }
            // The belief is the whole agent state here; the observation
            // only enters through the filter's reweighting.
            LobsterBuilder::Pf(filter) => x = filter.belief(),
            LobsterBuilder::Likelihood(pred) => {
                let m = pred.update(obs.as_slice());
                x.extend_from_slice(obs.as_slice());
                x.extend_from_slice(&m);
            }
            LobsterBuilder::Lstm => {
                x.extend_from_slice(obs.as_slice());
                one_hot_into(&mut x, action.map(|a| a.0), 3);
            }
        }
        AgentStateVector(x)
    }
}

impl StateBuilder<Lobster> for LobsterBuilder {
    fn dim(&self) -> usize {
        match self {
            LobsterBuilder::Obs => lobster::OBS_DIM,
            LobsterBuilder::Trace(_) | LobsterBuilder::Likelihood(_) => lobster::OBS_DIM + 2,
            LobsterBuilder::Pf(_) => lobster::STATE_COUNT,
            LobsterBuilder::Lstm => lobster::OBS_DIM + 3,
        }
    }

    fn on_reset(
        &mut self,
        _env: &Lobster,
        obs: &ObservationVector,
        rng: &mut RngStream,
    ) -> AgentStateVector {
        match self {
            LobsterBuilder::Trace(trace) => trace.reset(),
            LobsterBuilder::Pf(filter) => filter.reset(obs, rng),
            LobsterBuilder::Likelihood(pred) => pred.reset(),
            LobsterBuilder::Obs | LobsterBuilder::Lstm => {}
        }
        self.emit(obs, None)
    }

    fn on_step(
        &mut self,
        _env: &Lobster,
        action: Action,
        obs: &ObservationVector,
        rng: &mut RngStream,
    ) -> AgentStateVector {
        if let LobsterBuilder::Pf(filter) = self {
            filter.step(action, obs, rng);
        }
        self.emit(obs, Some(action))
    }
}

pub enum CompassBuilder {
    Obs,
    Pf(ParticleFilter<CompassBeliefSpace>),
    GroundTruth,
    Lstm,
}

impl CompassBuilder {
    pub fn depletions(&self) -> Option<u64> {
        match self {
            CompassBuilder::Pf(f) => Some(f.depletion_resets()),
            _ => None,
        }
    }

    fn emit(
        &mut self,
        env: &Compass,
        obs: &ObservationVector,
        action: Option<Action>,
    ) -> AgentStateVector {
        let mut x = Vec::with_capacity(self.dim());
        match self {
            CompassBuilder::Obs => x.extend_from_slice(obs.as_slice()),
            CompassBuilder::Pf(filter) => x = filter.belief(),
            CompassBuilder::GroundTruth => {
                let s = env.state();
                one_hot_into(&mut x, Some(s.x as usize), compass::INTERIOR);
                one_hot_into(&mut x, Some(s.y as usize), compass::INTERIOR);
                one_hot_into(&mut x, Some(s.pose as usize), 4);
            }
            CompassBuilder::Lstm => {
                x.extend_from_slice(obs.as_slice());
                one_hot_into(&mut x, action.map(|a| a.0), 3);
            }
        }
        AgentStateVector(x)
    }
}

impl StateBuilder<Compass> for CompassBuilder {
    fn dim(&self) -> usize {
        match self {
            CompassBuilder::Obs => compass::OBS_DIM,
            CompassBuilder::Pf(_) => compass::STATE_COUNT,
            CompassBuilder::GroundTruth => 2 * compass::INTERIOR + 4,
            CompassBuilder::Lstm => compass::OBS_DIM + 3,
        }
    }

    fn on_reset(
        &mut self,
        env: &Compass,
        obs: &ObservationVector,
        rng: &mut RngStream,
    ) -> AgentStateVector {
        if let CompassBuilder::Pf(filter) = self {
            filter.reset(obs, rng);
        }
        self.emit(env, obs, None)
    }

    fn on_step(
        &mut self,
        env: &Compass,
        action: Action,
        obs: &ObservationVector,
        rng: &mut RngStream,
    ) -> AgentStateVector {
        if let CompassBuilder::Pf(filter) = self {
            filter.step(action, obs, rng);
        }
        self.emit(env, obs, Some(action))
    }
}

pub enum RockBuilder {
    Obs,
    Pf(ParticleFilter<RockBeliefSpace>),
    GroundTruth,
    Lstm,
}

impl RockBuilder {
    pub fn depletions(&self) -> Option<u64> {
        match self {
            RockBuilder::Pf(f) => Some(f.depletion_resets()),
            _ => None,
        }
    }

    fn emit(
        &mut self,
        env: &RockSample,
        obs: &ObservationVector,
        action: Option<Action>,
    ) -> AgentStateVector {
        let mut x = Vec::with_capacity(self.dim());
        match self {
            RockBuilder::Obs => x.extend_from_slice(obs.as_slice()),
            // Position one-hots pass through; the per-rock belief marginals
            // replace the raw last-reading features.
            RockBuilder::Pf(filter) => {
                x.extend_from_slice(&obs.as_slice()[..2 * GRID]);
                x.extend_from_slice(&quality_marginals(&filter.belief()));
            }
            RockBuilder::GroundTruth => {
                x.extend_from_slice(&obs.as_slice()[..2 * GRID]);
                x.extend(env.state().good.iter().map(|&g| g as usize as f64));
            }
            RockBuilder::Lstm => {
                x.extend_from_slice(obs.as_slice());
                one_hot_into(&mut x, action.map(|a| a.0), env.action_count());
            }
        }
        AgentStateVector(x)
    }
}

impl StateBuilder<RockSample> for RockBuilder {
    fn dim(&self) -> usize {
        match self {
            RockBuilder::Obs => 2 * GRID + ROCKS,
            RockBuilder::Pf(_) | RockBuilder::GroundTruth => 2 * GRID + ROCKS,
            RockBuilder::Lstm => 2 * GRID + ROCKS + (5 + ROCKS),
        }
    }

    fn on_reset(
        &mut self,
        env: &RockSample,
        obs: &ObservationVector,
        rng: &mut RngStream,
    ) -> AgentStateVector {
        if let RockBuilder::Pf(filter) = self {
            filter.reset(obs, rng);
        }
        self.emit(env, obs, None)
    }

    fn on_step(
        &mut self,
        env: &RockSample,
        action: Action,
        obs: &ObservationVector,
        rng: &mut RngStream,
    ) -> AgentStateVector {
        if let RockBuilder::Pf(filter) = self {
            filter.step(action, obs, rng);
        }
        self.emit(env, obs, Some(action))
    }
}

/// Fishing agents all read the accumulated egocentric map. Options: a
/// recency-trace channel stacked under the six map channels, channel-wise
/// average pooling to shrink the input, and a previous-action one-hot for
/// recurrent agents.
#[derive(Clone)]
pub struct FishingBuilder {
    pool: usize,
    trace: Option<MapTrace>,
    recurrent: bool,
}

impl FishingBuilder {
    pub fn new(pool: usize, trace_lambda: Option<f64>, recurrent: bool) -> Self {
        assert!(pool == 1 || MAP_SIDE % pool == 0, "pool must tile the map");
        FishingBuilder {
            pool,
            trace: trace_lambda.map(|l| MapTrace::new(MAP_SIDE, MAP_SIDE, l)),
            recurrent,
        }
    }

    pub fn channels(&self) -> usize {
        CHANNELS + self.trace.is_some() as usize
    }

    /// Side length after pooling.
    pub fn map_side(&self) -> usize {
        MAP_SIDE / self.pool
    }

    fn emit(&mut self, obs: &ObservationVector, action: Option<Action>) -> AgentStateVector {
        let side = self.map_side();
        let cells = side * side;
        let mut x = Vec::with_capacity(self.dim());
        if self.pool == 1 {
            x.extend_from_slice(obs.as_slice());
            if let Some(trace) = &self.trace {
                x.extend_from_slice(trace.values());
            }
        } else {
            x.extend(avg_pool_channels(obs.as_slice(), CHANNELS, MAP_SIDE, self.pool));
            if let Some(trace) = &self.trace {
                x.extend(avg_pool_channels(trace.values(), 1, MAP_SIDE, self.pool));
            }
        }
        debug_assert_eq!(x.len(), self.channels() * cells);
        if self.recurrent {
            one_hot_into(&mut x, action.map(|a| a.0), 4);
        }
        AgentStateVector(x)
    }
}

impl StateBuilder<Fishing> for FishingBuilder {
    fn dim(&self) -> usize {
        let cells = self.map_side() * self.map_side();
        self.channels() * cells + if self.recurrent { 4 } else { 0 }
    }

    fn on_reset(
        &mut self,
        env: &Fishing,
        obs: &ObservationVector,
        _rng: &mut RngStream,
    ) -> AgentStateVector {
        if let Some(trace) = &mut self.trace {
            trace.reset();
            trace.update(env.last_visibility());
        }
        self.emit(obs, None)
    }

    fn on_step(
        &mut self,
        env: &Fishing,
        action: Action,
        obs: &ObservationVector,
        _rng: &mut RngStream,
    ) -> AgentStateVector {
        if let Some(trace) = &mut self.trace {
            let (dx, dy) = env.last_shift();
            trace.shift(dx, dy);
            trace.update(env.last_visibility());
        }
        self.emit(obs, Some(action))
    }
}
