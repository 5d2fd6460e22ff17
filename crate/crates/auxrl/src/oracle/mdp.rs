use crate::envs::EnumerableModel;
use crate::state::Action;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("discount {0} must lie in [0, 1) for value iteration")]
    BadDiscount(f64),
    #[error("stopping threshold must be positive, got {0}")]
    BadThreshold(f64),
    #[error("transition row for state {state}, action {action} sums to {sum}")]
    BadRow { state: usize, action: usize, sum: f64 },
}

/// One outgoing transition of a state-action pair.
#[derive(Clone, Copy, Debug)]
pub struct Edge {
    pub next: usize,
    pub probability: f64,
    pub reward: f64,
}

/// A fully enumerated MDP. Rows are sparse: only positive-probability
/// successors are stored, and each row sums to 1 within 1e-12.
#[derive(Clone, Debug)]
pub struct TabularMdp {
    pub state_count: usize,
    pub action_count: usize,
    /// `edges[s][a]` is the outgoing transition row of `(s, a)`.
    pub edges: Vec<Vec<Vec<Edge>>>,
    pub terminal: Vec<bool>,
    /// Start distribution over states; sums to 1.
    pub start: Vec<f64>,
    pub gamma: f64,
}

impl TabularMdp {
    /// Enumerate a model into tabular form, checking row stochasticity.
    pub fn from_model<M: EnumerableModel>(model: &M, gamma: f64) -> Result<Self, OracleError> {
        let n = model.state_count();
        let a = model.action_count();
        let mut edges = Vec::with_capacity(n);
        for s in 0..n {
            let mut per_action = Vec::with_capacity(a);
            for act in 0..a {
                let row = model.transition_row(s, Action(act));
                let sum: f64 = row.iter().map(|&(_, p)| p).sum();
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(OracleError::BadRow { state: s, action: act, sum });
                }
                let reward = model.reward(s, Action(act));
                per_action.push(
                    row.into_iter()
                        .map(|(next, probability)| Edge { next, probability, reward })
                        .collect(),
                );
            }
            edges.push(per_action);
        }
        let mut start = vec![0.0; n];
        for (s, p) in model.start_distribution() {
            start[s] += p;
        }
        let terminal = (0..n).map(|s| model.is_terminal(s)).collect();
        Ok(TabularMdp { state_count: n, action_count: a, edges, terminal, start, gamma })
    }

    /// Action-value of `(s, a)` under the given state values. Terminal
    /// successors contribute no bootstrap.
    pub fn q_value(&self, state: usize, action: usize, values: &[f64]) -> f64 {
        self.edges[state][action]
            .iter()
            .map(|e| {
                let cont = if self.terminal[e.next] { 0.0 } else { values[e.next] };
                e.probability * (e.reward + self.gamma * cont)
            })
            .sum()
    }
}
