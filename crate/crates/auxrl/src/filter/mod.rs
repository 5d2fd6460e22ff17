//! Particle-filter belief states.
//!
//! The filter is propagate–reweight–normalize only: no resampling. Each
//! step moves every particle through the environment's transition sampler,
//! multiplies its weight by the emission probability of the new observation,
//! and renormalizes. If every weight hits zero (depletion), weights reset to
//! uniform and a counter increments; nothing is raised.
//!
//! Environments plug in through [`BeliefSpace`], which fixes the enumerated
//! space the particles live in and how they start, move and weigh
//! observations. [`ExhaustiveFilter`] replaces sampling with full transition
//! enumeration over a dense weight vector; with the same plug-in it is the
//! filter's own exact limit, kept deliberately separate from the oracle
//! Bayes filter so the two can check each other.

pub mod spaces;

use crate::rng::RngStream;
use crate::state::{Action, ObservationVector};
use thiserror::Error;

pub use spaces::{quality_marginals, CompassBeliefSpace, LobsterBeliefSpace, RockBeliefSpace};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("particle count must be at least 1")]
    NoParticles,
}

/// Environment plug-in: the enumerable hidden space and its dynamics.
///
/// `propagate` and `emission` are queried against the side context as of the
/// step being processed; [`BeliefSpace::absorb_observation`] then advances
/// that context (e.g. the rover position decoded from position one-hots)
/// after the step's reweighting is done.
pub trait BeliefSpace {
    /// Size of the enumerated space beliefs are reported over.
    fn state_count(&self) -> usize;
    /// Draw one start state from the start distribution.
    fn sample_start(&self, rng: &mut RngStream) -> usize;
    /// Start distribution as a dense vector (for the exhaustive filter).
    fn start_belief(&self) -> Vec<f64>;
    /// When the start support is meant to be enumerated rather than sampled
    /// (one particle per possible start), the full list of start states.
    fn enumerated_start(&self) -> Option<Vec<usize>> {
        None
    }
    /// Sample a successor for one particle.
    fn propagate(&self, state: usize, action: Action, rng: &mut RngStream) -> usize;
    /// Full successor distribution of one state (exhaustive mode).
    fn propagate_exact(&self, state: usize, action: Action) -> Vec<(usize, f64)>;
    /// Likelihood of the new observation in a propagated state.
    fn emission(&self, state: usize, action: Action, obs: &ObservationVector) -> f64;
    /// Update side context from the step's observation (post-reweight).
    fn absorb_observation(&mut self, action: Action, obs: &ObservationVector) {
        let _ = (action, obs);
    }
    /// Initialize side context from the episode's first observation.
    fn begin_episode(&mut self, obs: &ObservationVector) {
        let _ = obs;
    }
}

/// Weighted particle ensemble over a [`BeliefSpace`].
pub struct ParticleFilter<S: BeliefSpace> {
    space: S,
    states: Vec<usize>,
    weights: Vec<f64>,
    requested: usize,
    depletion_resets: u64,
}

impl<S: BeliefSpace> ParticleFilter<S> {
    /// `k` particles sampled from the start distribution, or the enumerated
    /// start support when the space provides one (then `k` only gates the
    /// zero-particle configuration error).
    pub fn new(space: S, k: usize, rng: &mut RngStream) -> Result<Self, FilterError> {
        if k == 0 {
            return Err(FilterError::NoParticles);
        }
        let states = match space.enumerated_start() {
            Some(list) => list,
            None => (0..k).map(|_| space.sample_start(rng)).collect(),
        };
        let weights = vec![1.0 / states.len() as f64; states.len()];
        Ok(ParticleFilter { space, states, weights, requested: k, depletion_resets: 0 })
    }

    /// Start a new episode: fresh particles, uniform weights, side context
    /// seeded from the first observation. The depletion counter carries
    /// across episodes (it is a per-run diagnostic).
    pub fn reset(&mut self, obs: &ObservationVector, rng: &mut RngStream) {
        self.states = match self.space.enumerated_start() {
            Some(list) => list,
            None => (0..self.requested).map(|_| self.space.sample_start(rng)).collect(),
        };
        self.weights = vec![1.0 / self.states.len() as f64; self.states.len()];
        self.space.begin_episode(obs);
    }

    /// One filtering step for the pair (action taken, observation received).
    pub fn step(&mut self, action: Action, obs: &ObservationVector, rng: &mut RngStream) {
        for s in &mut self.states {
            *s = self.space.propagate(*s, action, rng);
        }
        let mut total = 0.0;
        for (s, w) in self.states.iter().zip(self.weights.iter_mut()) {
            *w *= self.space.emission(*s, action, obs);
            total += *w;
        }
        if total > 0.0 {
            for w in &mut self.weights {
                *w /= total;
            }
        } else {
            self.depletion_resets += 1;
            self.weights.fill(1.0 / self.states.len() as f64);
        }
        self.space.absorb_observation(action, obs);
    }

    /// Dense belief over the enumerated space: `belief[s] = Σ w[j]` over
    /// particles currently at `s`.
    pub fn belief(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.space.state_count()];
        for (&s, &w) in self.states.iter().zip(self.weights.iter()) {
            b[s] += w;
        }
        b
    }

    pub fn particle_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn depletion_resets(&self) -> u64 {
        self.depletion_resets
    }

    pub fn space(&self) -> &S {
        &self.space
    }
}

/// Sampling-free limit of the particle filter: a dense weight vector pushed
/// through the full transition enumeration each step, with the same
/// reweight/normalize/depletion policy as the ensemble version.
pub struct ExhaustiveFilter<S: BeliefSpace> {
    space: S,
    belief: Vec<f64>,
    depletion_resets: u64,
}

impl<S: BeliefSpace> ExhaustiveFilter<S> {
    pub fn new(space: S) -> Self {
        let belief = space.start_belief();
        ExhaustiveFilter { space, belief, depletion_resets: 0 }
    }

    pub fn reset(&mut self, obs: &ObservationVector) {
        self.belief = self.space.start_belief();
        self.space.begin_episode(obs);
    }

    pub fn step(&mut self, action: Action, obs: &ObservationVector) {
        let n = self.belief.len();
        let mut next = vec![0.0; n];
        for (s, &b) in self.belief.iter().enumerate() {
            if b == 0.0 {
                continue;
            }
            for (succ, p) in self.space.propagate_exact(s, action) {
                next[succ] += b * p;
            }
        }
        let mut total = 0.0;
        for (s, w) in next.iter_mut().enumerate() {
            if *w > 0.0 {
                *w *= self.space.emission(s, action, obs);
                total += *w;
            }
        }
        if total > 0.0 {
            for w in &mut next {
                *w /= total;
            }
            self.belief = next;
        } else {
            self.depletion_resets += 1;
            self.belief = vec![1.0 / n as f64; n];
        }
        self.space.absorb_observation(action, obs);
    }

    pub fn belief(&self) -> &[f64] {
        &self.belief
    }

    pub fn depletion_resets(&self) -> u64 {
        self.depletion_resets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Tiny synthetic space: `n` states on a ring, action 0 advances each
    /// particle deterministically, observations name the state modulo `m`.
    /// An optional relabeling permutation exercises equivariance.
    struct Ring {
        n: usize,
        m: usize,
        relabel: Vec<usize>,
    }

    impl Ring {
        fn plain(n: usize, m: usize) -> Ring {
            Ring { n, m, relabel: (0..n).collect() }
        }

        /// Position of `label` on the underlying ring.
        fn unlabel(&self, label: usize) -> usize {
            self.relabel.iter().position(|&l| l == label).unwrap()
        }
    }

    impl BeliefSpace for Ring {
        fn state_count(&self) -> usize {
            self.n
        }
        fn sample_start(&self, rng: &mut RngStream) -> usize {
            self.relabel[rng.below(self.n)]
        }
        fn start_belief(&self) -> Vec<f64> {
            vec![1.0 / self.n as f64; self.n]
        }
        fn propagate(&self, state: usize, _: Action, _: &mut RngStream) -> usize {
            self.relabel[(self.unlabel(state) + 1) % self.n]
        }
        fn propagate_exact(&self, state: usize, action: Action) -> Vec<(usize, f64)> {
            let mut throwaway = RngStream::from_seed(0);
            vec![(self.propagate(state, action, &mut throwaway), 1.0)]
        }
        fn emission(&self, state: usize, _: Action, obs: &ObservationVector) -> f64 {
            if (self.unlabel(state) % self.m) as f64 == obs.0[0] {
                1.0
            } else {
                0.0
            }
        }
    }

    fn obs(v: f64) -> ObservationVector {
        ObservationVector(vec![v])
    }

    #[test]
    fn zero_particles_is_a_configuration_error() {
        let mut rng = RngStream::from_seed(1);
        assert!(matches!(
            ParticleFilter::new(Ring::plain(4, 2), 0, &mut rng),
            Err(FilterError::NoParticles)
        ));
    }

    #[test]
    fn weights_stay_normalized_and_consistent_evidence_concentrates() {
        let mut rng = RngStream::from_seed(2);
        let mut pf = ParticleFilter::new(Ring::plain(4, 2), 40, &mut rng).unwrap();
        // After one advance, observing parity 1 keeps only odd ring cells.
        pf.step(Action(0), &obs(1.0), &mut rng);
        let b = pf.belief();
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(b[0], 0.0);
        assert_eq!(b[2], 0.0);
        assert_eq!(pf.depletion_resets(), 0);
    }

    #[test]
    fn uniform_likelihood_leaves_weights_unchanged() {
        let mut rng = RngStream::from_seed(3);
        // m = 1: every state reads parity 0, nothing is informative.
        let mut pf = ParticleFilter::new(Ring::plain(5, 1), 25, &mut rng).unwrap();
        let before = pf.weights().to_vec();
        pf.step(Action(0), &obs(0.0), &mut rng);
        // Renormalizing an already-normalized vector may wobble by an ulp.
        for (w, b) in pf.weights().iter().zip(&before) {
            assert!((w - b).abs() < 1e-15, "{w} vs {b}");
        }
    }

    #[test]
    fn depletion_resets_weights_to_uniform_and_counts() {
        let mut rng = RngStream::from_seed(4);
        let mut pf = ParticleFilter::new(Ring::plain(4, 2), 8, &mut rng).unwrap();
        pf.step(Action(0), &obs(7.0), &mut rng);
        assert_eq!(pf.depletion_resets(), 1);
        assert!(pf.weights().iter().all(|&w| (w - 0.125).abs() < 1e-15));
    }

    #[test]
    fn belief_is_permutation_equivariant() {
        // Run the same evidence through the plain ring and a relabeled copy;
        // beliefs must agree up to the relabeling.
        let relabel = vec![3, 0, 4, 1, 5, 2];
        let mut rng_a = RngStream::from_seed(9);
        let mut rng_b = RngStream::from_seed(9);
        let mut plain = ParticleFilter::new(Ring::plain(6, 3), 60, &mut rng_a).unwrap();
        let relabeled = Ring { n: 6, m: 3, relabel: relabel.clone() };
        let mut permuted = ParticleFilter::new(relabeled, 60, &mut rng_b).unwrap();
        for step in 0..6 {
            let o = obs(((step + 1) % 3) as f64);
            plain.step(Action(0), &o, &mut rng_a);
            permuted.step(Action(0), &o, &mut rng_b);
        }
        let a = plain.belief();
        let b = permuted.belief();
        for s in 0..6 {
            assert!((a[s] - b[relabel[s]]).abs() < 1e-12);
        }
    }

    #[test]
    fn exhaustive_filter_tracks_the_deterministic_ring_exactly() {
        let mut ex = ExhaustiveFilter::new(Ring::plain(4, 4));
        // Uniform start; observing residue 2 after one deterministic
        // advance pins the state.
        ex.step(Action(0), &obs(2.0));
        assert_eq!(ex.belief(), &[0.0, 0.0, 1.0, 0.0]);
        // Further steps keep the support singleton.
        ex.step(Action(0), &obs(3.0));
        assert_eq!(ex.belief(), &[0.0, 0.0, 0.0, 1.0]);
    }
}
