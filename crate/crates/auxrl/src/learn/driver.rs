//! Training loop glue: an [`Agent`] bundles a value network with its
//! optimizer and update schedule, a [`StateBuilder`] turns raw observations
//! into agent-state vectors, and [`run_steps`] drives both against an
//! environment while reporting per-step events to the caller.

use std::collections::VecDeque;

use super::adam::{Optimizer, Precision};
use super::cnn::CnnQ;
use super::linear::LinearQ;
use super::lstm::{tbptt_update, RecurrentQ};
use super::mlp::MlpQ;
use super::policy::epsilon_greedy;
use super::replay::ReplayBuffer;
use super::LearnError;
use crate::envs::Environment;
use crate::rng::RngStream;
use crate::state::{
    build_agent_state, Action, AgentStateVector, AuxiliaryInputSet, CompositionMode,
    HiddenSnapshot, ObservationVector, TransitionRecord,
};

/// Maps observations (plus whatever the builder tracks across steps) to the
/// agent-state vector the value network consumes. Builders own their
/// recursive state: traces, particle filters, egocentric maps. They receive
/// the environment by shared reference so privileged builders can read
/// ground truth and map builders can query layout geometry.
pub trait StateBuilder<E: Environment> {
    /// Length of the vectors produced by `on_reset` / `on_step`.
    fn dim(&self) -> usize;

    /// Called with the first observation of an episode. Implementations
    /// reset their internal recursion here.
    fn on_reset(&mut self, env: &E, obs: &ObservationVector, rng: &mut RngStream)
        -> AgentStateVector;

    /// Called after each environment step with the action just taken and
    /// the observation it produced.
    fn on_step(
        &mut self,
        env: &E,
        action: Action,
        obs: &ObservationVector,
        rng: &mut RngStream,
    ) -> AgentStateVector;
}

/// Declarative description of how a builder assembles its output; concrete
/// builders hold one of these and feed it observation + auxiliary channels.
#[derive(Clone, Copy, Debug)]
pub struct CompositionSpec {
    pub mode: CompositionMode,
    pub obs_dim: usize,
    pub aux_dim: usize,
    pub action_count: usize,
}

impl CompositionSpec {
    pub fn dim(&self) -> usize {
        match self.mode {
            CompositionMode::ObsOnly => self.obs_dim,
            CompositionMode::AuxOnly => self.aux_dim,
            CompositionMode::ObsAux => self.obs_dim + self.aux_dim,
            CompositionMode::ObsAuxAction => self.obs_dim + self.aux_dim + self.action_count,
        }
    }

    pub fn assemble(
        &self,
        obs: &ObservationVector,
        aux: &AuxiliaryInputSet,
        prev_action: Option<Action>,
    ) -> AgentStateVector {
        build_agent_state(obs, aux, prev_action, self.action_count, self.mode)
    }
}

/// Value network behind a single interface. The recurrent variant threads a
/// hidden snapshot through `q_values`; feedforward variants ignore it.
#[derive(Clone, Debug)]
pub enum Net {
    Linear(LinearQ),
    Mlp(MlpQ),
    Cnn(CnnQ),
    Recurrent(RecurrentQ),
}

impl Net {
    pub fn is_recurrent(&self) -> bool {
        matches!(self, Net::Recurrent(_))
    }

    pub fn params(&self) -> &[f64] {
        match self {
            Net::Linear(n) => &n.params,
            Net::Mlp(n) => &n.params,
            Net::Cnn(n) => &n.params,
            Net::Recurrent(n) => &n.params,
        }
    }

    pub fn params_mut(&mut self) -> &mut Vec<f64> {
        match self {
            Net::Linear(n) => &mut n.params,
            Net::Mlp(n) => &mut n.params,
            Net::Cnn(n) => &mut n.params,
            Net::Recurrent(n) => &mut n.params,
        }
    }

    /// Action values for `x`. For the recurrent net, `live` is advanced one
    /// step (`None` means "start of episode": the zero state is used).
    pub fn q_values(&self, x: &[f64], live: &mut Option<HiddenSnapshot>) -> Vec<f64> {
        match self {
            Net::Linear(n) => n.q_values(x),
            Net::Mlp(n) => n.q_values(x),
            Net::Cnn(n) => n.q_values(x),
            Net::Recurrent(n) => {
                let state = live.clone().unwrap_or_else(|| n.zero_state());
                let (q, next) = n.step(x, &state);
                *live = Some(next);
                q
            }
        }
    }

    /// Action values for a feedforward net; used when computing bootstrap
    /// targets, where no hidden state is involved.
    fn feedforward_q(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Net::Linear(n) => n.q_values(x),
            Net::Mlp(n) => n.q_values(x),
            Net::Cnn(n) => n.q_values(x),
            Net::Recurrent(_) => unreachable!("recurrent targets go through window_targets"),
        }
    }

    fn forward_backward(&self, x: &[f64], action: Action, target: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Net::Linear(n) => n.forward_backward(x, action, target),
            Net::Mlp(n) => n.forward_backward(x, action, target),
            Net::Cnn(n) => n.forward_backward(x, action, target),
            Net::Recurrent(_) => unreachable!("recurrent updates go through window_loss_grads"),
        }
    }
}

/// When and from what data the agent updates its parameters.
#[derive(Debug)]
pub enum UpdateMode {
    /// One semi-gradient Sarsa step per transition, feedforward nets only.
    Online,
    /// Recurrent nets without replay: after every transition, backprop
    /// through the last `truncation` same-episode transitions, warm-started
    /// from the snapshot stored with the oldest one.
    OnlineRecurrent { truncation: usize },
    /// Store every transition; every `every` steps, once the buffer holds at
    /// least one batch, average gradients over `batch` sampled windows
    /// (length `window` for recurrent nets, single transitions otherwise)
    /// and take one optimizer step.
    Replay { buffer: ReplayBuffer, batch: usize, window: usize, every: u64 },
}

/// What [`Agent::act`] hands back: the chosen action, the action values it
/// was chosen from, and (recurrent nets) the hidden state before `x` was
/// consumed, which the caller stores on the transition record.
#[derive(Clone, Debug)]
pub struct ActOutcome {
    pub action: Action,
    pub q: Vec<f64>,
    pub snapshot: Option<HiddenSnapshot>,
}

/// A value network plus everything needed to improve it from experience.
#[derive(Debug)]
pub struct Agent {
    pub net: Net,
    pub optimizer: Optimizer,
    pub precision: Precision,
    pub gamma: f64,
    pub epsilon: f64,
    mode: UpdateMode,
    live: Option<HiddenSnapshot>,
    rolling: VecDeque<TransitionRecord>,
    episode: u64,
    observe_count: u64,
}

impl Agent {
    pub fn new(
        net: Net,
        optimizer: Optimizer,
        precision: Precision,
        gamma: f64,
        epsilon: f64,
        mode: UpdateMode,
    ) -> Self {
        match &mode {
            UpdateMode::Online => {
                assert!(!net.is_recurrent(), "recurrent nets need OnlineRecurrent or Replay")
            }
            UpdateMode::OnlineRecurrent { truncation } => {
                assert!(net.is_recurrent(), "OnlineRecurrent requires a recurrent net");
                assert!(*truncation >= 1);
            }
            UpdateMode::Replay { batch, window, every, .. } => {
                assert!(*batch >= 1 && *window >= 1 && *every >= 1);
            }
        }
        Agent {
            net,
            optimizer,
            precision,
            gamma,
            epsilon,
            mode,
            live: None,
            rolling: VecDeque::new(),
            episode: 0,
            observe_count: 0,
        }
    }

    pub fn episode(&self) -> u64 {
        self.episode
    }

    pub fn mode(&self) -> &UpdateMode {
        &self.mode
    }

    /// Clears per-episode state (live hidden, rolling window) and bumps the
    /// episode counter so replay windows cannot span the boundary.
    pub fn begin_episode(&mut self) {
        self.live = None;
        self.rolling.clear();
        self.episode += 1;
    }

    /// ε-greedy action selection; advances the live hidden state for
    /// recurrent nets and reports the pre-advance snapshot.
    pub fn act(&mut self, x: &AgentStateVector, rng: &mut RngStream) -> Result<ActOutcome, LearnError> {
        let snapshot = match &self.net {
            Net::Recurrent(n) => Some(self.live.clone().unwrap_or_else(|| n.zero_state())),
            _ => None,
        };
        let q = self.net.q_values(x.as_slice(), &mut self.live);
        let action = epsilon_greedy(&q, self.epsilon, rng)?;
        Ok(ActOutcome { action, q, snapshot })
    }

    /// Feeds one completed transition to the update rule. Returns the loss
    /// of the update it triggered, if any (replay agents only update on
    /// their cadence, and only once the buffer holds a batch).
    pub fn observe(
        &mut self,
        rec: TransitionRecord,
        rng: &mut RngStream,
    ) -> Result<Option<f64>, LearnError> {
        self.observe_count += 1;
        match &mut self.mode {
            UpdateMode::Online => {
                let target = if rec.terminal {
                    rec.reward
                } else {
                    let q_next = self.net.feedforward_q(rec.x_next.as_slice());
                    rec.reward + self.gamma * q_next[rec.action_next.0]
                };
                let (q, grads) = self.net.forward_backward(rec.x.as_slice(), rec.action, target);
                let err = q[rec.action.0] - target;
                self.optimizer.step(self.net.params_mut(), &grads, self.precision)?;
                Ok(Some(0.5 * err * err))
            }
            UpdateMode::OnlineRecurrent { truncation } => {
                debug_assert!(rec.hidden.is_some(), "recurrent records need a snapshot");
                self.rolling.push_back(rec);
                if self.rolling.len() > *truncation {
                    self.rolling.pop_front();
                }
                let window: Vec<&TransitionRecord> = self.rolling.iter().collect();
                let Net::Recurrent(net) = &mut self.net else {
                    unreachable!("checked at construction")
                };
                let loss = tbptt_update(net, &window, self.gamma, &mut self.optimizer, self.precision)?;
                Ok(Some(loss))
            }
            UpdateMode::Replay { buffer, batch, window, every } => {
                buffer.push(self.episode, rec);
                if self.observe_count % *every != 0 || buffer.len() < *batch {
                    return Ok(None);
                }
                replay_batch_update(
                    &mut self.net,
                    &mut self.optimizer,
                    self.precision,
                    self.gamma,
                    buffer,
                    *batch,
                    *window,
                    rng,
                )
            }
        }
    }
}

/// One averaged-gradient optimizer step over `batch` windows drawn from the
/// buffer. Bootstrap targets for every window are computed from the current
/// parameters before any of the batch's gradients are applied.
#[allow(clippy::too_many_arguments)]
fn replay_batch_update(
    net: &mut Net,
    optimizer: &mut Optimizer,
    precision: Precision,
    gamma: f64,
    buffer: &ReplayBuffer,
    batch: usize,
    window: usize,
    rng: &mut RngStream,
) -> Result<Option<f64>, LearnError> {
    let want = if net.is_recurrent() { window } else { 1 };
    let mut mean_grads = vec![0.0; net.params().len()];
    let mut mean_loss = 0.0;
    let mut drawn = 0usize;
    for _ in 0..batch {
        // Episodes shorter than the requested window still deserve samples;
        // fall back to the longest length the buffer can serve.
        let sampled = (1..=want)
            .rev()
            .find_map(|len| buffer.sample_window(len, rng));
        let Some(w) = sampled else { continue };
        let (loss, grads) = match net {
            Net::Recurrent(n) => {
                let targets = n.window_targets(&w, gamma);
                n.window_loss_grads(&w, &targets)
            }
            _ => {
                let rec = w[0];
                let target = if rec.terminal {
                    rec.reward
                } else {
                    let q_next = net.feedforward_q(rec.x_next.as_slice());
                    rec.reward + gamma * q_next[rec.action_next.0]
                };
                let (q, grads) = net.forward_backward(rec.x.as_slice(), rec.action, target);
                let err = q[rec.action.0] - target;
                (0.5 * err * err, grads)
            }
        };
        for (m, g) in mean_grads.iter_mut().zip(&grads) {
            *m += g;
        }
        mean_loss += loss;
        drawn += 1;
    }
    if drawn == 0 {
        return Ok(None);
    }
    let scale = 1.0 / drawn as f64;
    for m in &mut mean_grads {
        *m *= scale;
    }
    optimizer.step(net.params_mut(), &mean_grads, precision)?;
    Ok(Some(mean_loss * scale))
}

/// Per-step report handed to the `run_steps` callback.
#[derive(Clone, Copy, Debug)]
pub struct StepEvent {
    /// 1-based count of environment steps taken so far.
    pub step: u64,
    /// Episode the step belongs to (1-based).
    pub episode: u64,
    pub reward: f64,
    /// Environment said the episode is over.
    pub terminal: bool,
    /// Episode ended here, by termination or by hitting the step cap.
    pub episode_end: bool,
    /// Loss of the parameter update this step triggered, if any.
    pub loss: Option<f64>,
}

/// Runs `total_steps` environment steps of ε-greedy Sarsa training.
/// `episode_cap` truncates episodes without a terminal signal: the final
/// transition keeps its bootstrap, but the environment is reset. The
/// callback sees every step and may inspect the agent read-only (e.g. to
/// launch an offline evaluation with a separate environment).
pub fn run_steps<E, B, F>(
    env: &mut E,
    builder: &mut B,
    agent: &mut Agent,
    total_steps: u64,
    episode_cap: Option<u64>,
    rng: &mut RngStream,
    mut on_step: F,
) -> Result<(), LearnError>
where
    E: Environment,
    B: StateBuilder<E>,
    F: FnMut(&StepEvent, &Agent),
{
    let obs = env.reset(rng);
    let mut x = builder.on_reset(env, &obs, rng);
    agent.begin_episode();
    let mut act = agent.act(&x, rng)?;
    let mut steps_in_episode: u64 = 0;
    for step in 1..=total_steps {
        let outcome = env.step(act.action, rng);
        steps_in_episode += 1;
        let x_next = builder.on_step(env, act.action, &outcome.obs, rng);
        let next_act = if outcome.terminal { None } else { Some(agent.act(&x_next, rng)?) };
        let rec = TransitionRecord {
            x: x.clone(),
            action: act.action,
            reward: outcome.reward,
            x_next: x_next.clone(),
            action_next: next_act.as_ref().map_or(Action(0), |n| n.action),
            terminal: outcome.terminal,
            hidden: act.snapshot.clone(),
        };
        let loss = agent.observe(rec, rng)?;
        let truncated = !outcome.terminal
            && episode_cap.is_some_and(|cap| steps_in_episode >= cap);
        let event = StepEvent {
            step,
            episode: agent.episode(),
            reward: outcome.reward,
            terminal: outcome.terminal,
            episode_end: outcome.terminal || truncated,
            loss,
        };
        on_step(&event, agent);
        if event.episode_end {
            let obs = env.reset(rng);
            x = builder.on_reset(env, &obs, rng);
            agent.begin_episode();
            act = agent.act(&x, rng)?;
            steps_in_episode = 0;
        } else {
            x = x_next;
            act = next_act.expect("non-terminal step selected a next action");
        }
    }
    Ok(())
}

/// Plays `episodes` greedy (ε = 0) episodes and returns their discounted
/// returns. Takes the agent by shared reference, so it cannot disturb
/// training state; recurrent hidden state lives in a local.
pub fn evaluate_greedy<E, B>(
    env: &mut E,
    builder: &mut B,
    agent: &Agent,
    episodes: usize,
    episode_cap: u64,
    rng: &mut RngStream,
) -> Result<Vec<f64>, LearnError>
where
    E: Environment,
    B: StateBuilder<E>,
{
    let mut returns = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let obs = env.reset(rng);
        let mut x = builder.on_reset(env, &obs, rng);
        let mut live: Option<HiddenSnapshot> = None;
        let mut total = 0.0;
        let mut discount = 1.0;
        for _ in 0..episode_cap {
            let q = agent.net.q_values(x.as_slice(), &mut live);
            let action = epsilon_greedy(&q, 0.0, rng)?;
            let outcome = env.step(action, rng);
            total += discount * outcome.reward;
            discount *= agent.gamma;
            if outcome.terminal {
                break;
            }
            x = builder.on_step(env, action, &outcome.obs, rng);
        }
        returns.push(total);
    }
    Ok(returns)
}
