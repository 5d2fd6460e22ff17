//! Per-environment belief-space plug-ins.

use super::BeliefSpace;
use crate::envs::compass::{self, Compass, CompassModel};
use crate::envs::lobster::{self, LobsterModel, LobsterParams, LobsterState};
use crate::envs::rocksample::{RockQualityModel, CHECK_BASE, GRID, QUALITY_STATES, ROCKS};
use crate::envs::EnumerableModel;
use crate::rng::RngStream;
use crate::state::{Action, ObservationVector};

/// Lobster: 12 enumerable states, known fixed start, deterministic
/// emissions. Particles move through the same event sampler as the
/// simulator; the exhaustive route multiplies the analytic rows.
pub struct LobsterBeliefSpace {
    params: LobsterParams,
    model: LobsterModel,
}

impl LobsterBeliefSpace {
    pub fn new(params: LobsterParams) -> Self {
        LobsterBeliefSpace { params, model: LobsterModel::new(params) }
    }
}

impl BeliefSpace for LobsterBeliefSpace {
    fn state_count(&self) -> usize {
        lobster::STATE_COUNT
    }

    fn sample_start(&self, _: &mut RngStream) -> usize {
        lobster::start_state().index()
    }

    fn start_belief(&self) -> Vec<f64> {
        let mut b = vec![0.0; lobster::STATE_COUNT];
        b[lobster::start_state().index()] = 1.0;
        b
    }

    fn propagate(&self, state: usize, action: Action, rng: &mut RngStream) -> usize {
        let (next, _) =
            lobster::sample_transition(&LobsterState::from_index(state), action, &self.params, rng);
        next.index()
    }

    fn propagate_exact(&self, state: usize, action: Action) -> Vec<(usize, f64)> {
        self.model.transition_row(state, action)
    }

    fn emission(&self, state: usize, _: Action, obs: &ObservationVector) -> f64 {
        if lobster::observation(&LobsterState::from_index(state)).0 == obs.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Compass: one particle per possible start state, exact deterministic
/// propagation (no sampling noise to average over).
pub struct CompassBeliefSpace;

impl BeliefSpace for CompassBeliefSpace {
    fn state_count(&self) -> usize {
        compass::STATE_COUNT
    }

    fn sample_start(&self, rng: &mut RngStream) -> usize {
        let starts = Compass::start_states();
        starts[rng.below(starts.len())]
    }

    fn start_belief(&self) -> Vec<f64> {
        let starts = Compass::start_states();
        let mut b = vec![0.0; compass::STATE_COUNT];
        for s in &starts {
            b[*s] = 1.0 / starts.len() as f64;
        }
        b
    }

    fn enumerated_start(&self) -> Option<Vec<usize>> {
        Some(Compass::start_states())
    }

    fn propagate(&self, state: usize, action: Action, _: &mut RngStream) -> usize {
        let (next, _, _) = compass::transition(&compass::CompassState::from_index(state), action);
        next.index()
    }

    fn propagate_exact(&self, state: usize, action: Action) -> Vec<(usize, f64)> {
        CompassModel.transition_row(state, action)
    }

    fn emission(&self, state: usize, _: Action, obs: &ObservationVector) -> f64 {
        if compass::observation(&compass::CompassState::from_index(state)).0 == obs.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// RockSample: particles live in the 256-point rock-quality subspace. The
/// rover position is fully observable, so the space folds it in as side
/// context decoded from the position one-hots; quality dynamics and check
/// emissions are conditioned on the position at the time of the action.
pub struct RockBeliefSpace {
    model: RockQualityModel,
    position: (u8, u8),
}

impl RockBeliefSpace {
    pub fn new(model: RockQualityModel) -> Self {
        RockBeliefSpace { model, position: crate::envs::rocksample::start_position() }
    }

    pub fn position(&self) -> (u8, u8) {
        self.position
    }

    fn decode_position(obs: &ObservationVector) -> (u8, u8) {
        let x = obs.0[..GRID].iter().position(|&v| v == 1.0).expect("x one-hot");
        let y = obs.0[GRID..2 * GRID].iter().position(|&v| v == 1.0).expect("y one-hot");
        (x as u8, y as u8)
    }
}

impl BeliefSpace for RockBeliefSpace {
    fn state_count(&self) -> usize {
        QUALITY_STATES
    }

    fn sample_start(&self, rng: &mut RngStream) -> usize {
        // Moralities are independent fair coins: uniform over all 256.
        rng.below(QUALITY_STATES)
    }

    fn start_belief(&self) -> Vec<f64> {
        vec![1.0 / QUALITY_STATES as f64; QUALITY_STATES]
    }

    fn propagate(&self, state: usize, action: Action, _: &mut RngStream) -> usize {
        self.model.successor(state, action, self.position)
    }

    fn propagate_exact(&self, state: usize, action: Action) -> Vec<(usize, f64)> {
        vec![(self.model.successor(state, action, self.position), 1.0)]
    }

    fn emission(&self, state: usize, action: Action, obs: &ObservationVector) -> f64 {
        if action.0 >= CHECK_BASE {
            let rock = action.0 - CHECK_BASE;
            let reading = obs.0[2 * GRID + rock] == 1.0;
            self.model.check_emission(state, rock, reading, self.position)
        } else {
            1.0
        }
    }

    fn absorb_observation(&mut self, _: Action, obs: &ObservationVector) {
        self.position = Self::decode_position(obs);
    }

    fn begin_episode(&mut self, obs: &ObservationVector) {
        self.position = Self::decode_position(obs);
    }
}

/// Fold a dense quality belief into per-rock goodness marginals:
/// entry `i` is the total weight of states where rock `i` is good.
pub fn quality_marginals(belief: &[f64]) -> [f64; ROCKS] {
    let mut m = [0.0; ROCKS];
    for (q, &w) in belief.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (i, slot) in m.iter_mut().enumerate() {
            if (q >> i) & 1 == 1 {
                *slot += w;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{Environment, Step};
    use crate::filter::ParticleFilter;

    #[test]
    fn lobster_particles_start_at_the_known_start() {
        let mut rng = RngStream::from_seed(5);
        let pf =
            ParticleFilter::new(LobsterBeliefSpace::new(LobsterParams::default()), 100, &mut rng)
                .unwrap();
        assert_eq!(pf.particle_count(), 100);
        assert!(pf.states().iter().all(|&s| s == lobster::start_state().index()));
        assert!(pf.weights().iter().all(|&w| (w - 0.01).abs() < 1e-15));
    }

    #[test]
    fn lobster_filter_tracks_the_simulator_when_obs_identify_the_state() {
        // Follow a live environment; whenever the rover sits at a pot the
        // observation pins that pot's bit, so the belief over the true state
        // must stay positive throughout.
        let mut env_rng = RngStream::from_seed(40);
        let mut pf_rng = RngStream::from_seed(41);
        let mut env = crate::envs::lobster::Lobster::new(LobsterParams::default());
        let obs0 = env.reset(&mut env_rng);
        let mut pf =
            ParticleFilter::new(LobsterBeliefSpace::new(LobsterParams::default()), 400, &mut pf_rng)
                .unwrap();
        pf.reset(&obs0, &mut pf_rng);
        let actions = [0usize, 0, 2, 1, 1, 2, 0, 2, 1, 0];
        for (t, &a) in actions.iter().enumerate() {
            let Step { obs, .. } = env.step(Action(a), &mut env_rng);
            pf.step(Action(a), &obs, &mut pf_rng);
            let b = pf.belief();
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12, "normalized at step {t}");
            assert!(
                b[env.state().index()] > 0.0 || pf.depletion_resets() > 0,
                "true state carries weight at step {t}"
            );
        }
    }

    #[test]
    fn compass_enumerates_one_particle_per_start_and_support_never_grows() {
        let mut rng = RngStream::from_seed(6);
        let mut pf = ParticleFilter::new(CompassBeliefSpace, 1, &mut rng).unwrap();
        assert_eq!(pf.particle_count(), 195);

        let mut env = Compass::new();
        let obs0 = env.reset(&mut rng);
        pf.reset(&obs0, &mut rng);
        let support = |pf: &ParticleFilter<CompassBeliefSpace>| {
            pf.belief().iter().filter(|&&w| w > 0.0).count()
        };
        let mut last = support(&pf);
        // Forward presses toward a wall, then a turn and more forwards; the
        // observed colors prune inconsistent particles monotonically.
        let script = [0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 1, 0];
        for &a in &script {
            let step = env.step(Action(a), &mut rng);
            pf.step(Action(a), &step.obs, &mut rng);
            let now = support(&pf);
            assert!(now <= last, "support grew from {last} to {now}");
            assert!(pf.belief()[env.state().index()] > 0.0, "true state kept");
            last = now;
            if step.terminal {
                break;
            }
        }
        assert!(last < 195);
        assert_eq!(pf.depletion_resets(), 0);
    }

    #[test]
    fn compass_single_state_support_stays_single() {
        let mut rng = RngStream::from_seed(7);
        let mut pf = ParticleFilter::new(CompassBeliefSpace, 1, &mut rng).unwrap();
        let mut env = Compass::new();
        // Drive west along row 5 into the blue wall (pins the column), turn
        // right and drive north into the orange wall (pins the row). Row 5
        // avoids the green goal cell, so the run never terminates.
        env.force_state(compass::CompassState { x: 5, y: 5, pose: compass::Pose::West });
        pf.reset(&compass::observation(env.state()), &mut rng);
        let script: Vec<Action> = std::iter::repeat(compass::FORWARD)
            .take(8)
            .chain(std::iter::once(compass::TURN_RIGHT))
            .chain(std::iter::repeat(compass::FORWARD).take(8))
            .collect();
        let mut singleton_since = None;
        for (t, &a) in script.iter().enumerate() {
            let step = env.step(a, &mut rng);
            assert!(!step.terminal, "the script stays clear of the goal");
            pf.step(a, &step.obs, &mut rng);
            let support = pf.belief().iter().filter(|&&w| w > 0.0).count();
            match singleton_since {
                None => {
                    if support == 1 {
                        singleton_since = Some(t);
                    }
                }
                Some(_) => assert_eq!(support, 1, "support re-expanded at step {t}"),
            }
        }
        assert!(singleton_since.is_some(), "this script localizes the agent");
        assert_eq!(pf.depletion_resets(), 0);
    }

    #[test]
    fn certain_check_pins_the_marginal() {
        // Rover parked on rock 0's cell: distance 0, accuracy 1, so one
        // "good" reading forces marginal 0 to exactly 1.
        let rocks = [(1, 1), (2, 5), (3, 3), (4, 0), (5, 5), (6, 2), (0, 6), (2, 2)];
        let model = RockQualityModel::new(rocks, 5.0);
        let mut rng = RngStream::from_seed(8);
        let mut pf = ParticleFilter::new(RockBeliefSpace::new(model), 100, &mut rng).unwrap();

        let obs_at = |pos: (u8, u8), readings: [f64; ROCKS]| {
            let mut o = vec![0.0; 2 * GRID + ROCKS];
            o[pos.0 as usize] = 1.0;
            o[GRID + pos.1 as usize] = 1.0;
            o[2 * GRID..].copy_from_slice(&readings);
            ObservationVector(o)
        };
        let mut readings = [0.5; ROCKS];
        pf.reset(&obs_at((1, 1), readings), &mut rng);

        readings[0] = 1.0;
        pf.step(Action(CHECK_BASE), &obs_at((1, 1), readings), &mut rng);
        let marginals = quality_marginals(&pf.belief());
        assert!((marginals[0] - 1.0).abs() < 1e-12, "got {}", marginals[0]);
        // Unqueried rocks keep their prior (uniform over particles).
        assert!(marginals[3] > 0.2 && marginals[3] < 0.8);
    }

    #[test]
    fn sampling_after_certainty_flips_the_marginal_to_zero() {
        let rocks = [(1, 1), (2, 5), (3, 3), (4, 0), (5, 5), (6, 2), (0, 6), (2, 2)];
        let model = RockQualityModel::new(rocks, 5.0);
        let mut rng = RngStream::from_seed(9);
        let mut pf = ParticleFilter::new(RockBeliefSpace::new(model), 64, &mut rng).unwrap();
        let obs_at = |pos: (u8, u8), readings: [f64; ROCKS]| {
            let mut o = vec![0.0; 2 * GRID + ROCKS];
            o[pos.0 as usize] = 1.0;
            o[GRID + pos.1 as usize] = 1.0;
            o[2 * GRID..].copy_from_slice(&readings);
            ObservationVector(o)
        };
        let readings = [0.5; ROCKS];
        pf.reset(&obs_at((1, 1), readings), &mut rng);
        // Sampling at rock 0's cell turns it bad in every particle.
        pf.step(Action(4), &obs_at((1, 1), readings), &mut rng);
        assert_eq!(quality_marginals(&pf.belief())[0], 0.0);
    }

    #[test]
    fn uniform_quality_belief_has_half_marginals() {
        let b = vec![1.0 / QUALITY_STATES as f64; QUALITY_STATES];
        for m in quality_marginals(&b) {
            assert!((m - 0.5).abs() < 1e-12);
        }
    }
}
