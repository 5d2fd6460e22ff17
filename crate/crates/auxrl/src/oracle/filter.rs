use crate::envs::EnumerableModel;
use crate::state::{Action, ObservationVector};

/// Exact hidden-Markov forward filter over an enumerable model with
/// deterministic emissions: the likelihood of an observation in a state is 1
/// when the model emits exactly that vector and 0 otherwise.
///
/// When an observation has zero likelihood under every state (numerically
/// impossible evidence), the posterior resets to uniform and a counter is
/// incremented, mirroring how the particle filter handles weight depletion
/// so the two stay comparable trajectory-for-trajectory.
pub struct BayesFilter<'m, M: EnumerableModel> {
    model: &'m M,
    belief: Vec<f64>,
    resets: u64,
}

impl<'m, M: EnumerableModel> BayesFilter<'m, M> {
    pub fn new(model: &'m M, prior: Vec<f64>) -> Self {
        assert_eq!(prior.len(), model.state_count());
        let sum: f64 = prior.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "prior sums to {sum}");
        BayesFilter { model, belief: prior, resets: 0 }
    }

    pub fn from_start(model: &'m M) -> Self {
        let mut prior = vec![0.0; model.state_count()];
        for (s, p) in model.start_distribution() {
            prior[s] += p;
        }
        BayesFilter::new(model, prior)
    }

    pub fn belief(&self) -> &[f64] {
        &self.belief
    }

    pub fn depletion_resets(&self) -> u64 {
        self.resets
    }

    /// Condition on one (action, observation) pair: propagate the belief
    /// through the transition rows, weight by the emission indicator,
    /// normalize.
    pub fn step(&mut self, action: Action, obs: &ObservationVector) {
        let n = self.model.state_count();
        let mut propagated = vec![0.0; n];
        for s in 0..n {
            let b = self.belief[s];
            if b == 0.0 {
                continue;
            }
            for (next, p) in self.model.transition_row(s, action) {
                propagated[next] += b * p;
            }
        }
        for (s, w) in propagated.iter_mut().enumerate() {
            if *w > 0.0 && self.model.observation_of(s).0 != obs.0 {
                *w = 0.0;
            }
        }
        let total: f64 = propagated.iter().sum();
        if total > 0.0 {
            for w in &mut propagated {
                *w /= total;
            }
            self.belief = propagated;
        } else {
            self.resets += 1;
            self.belief = vec![1.0 / n as f64; n];
        }
    }
}

/// Run the filter over a whole trajectory, returning the posterior after
/// each step.
pub fn exact_filter<M: EnumerableModel>(
    model: &M,
    prior: Vec<f64>,
    trajectory: &[(Action, ObservationVector)],
) -> Vec<Vec<f64>> {
    let mut filter = BayesFilter::new(model, prior);
    trajectory
        .iter()
        .map(|(a, o)| {
            filter.step(*a, o);
            filter.belief().to_vec()
        })
        .collect()
}
