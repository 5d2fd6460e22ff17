use super::LearnError;
use crate::state::Action;

/// Linear action-value function: one weight row per action,
/// `q(x, a) = params[a] · x`. Rows are stored contiguously.
#[derive(Clone, Debug)]
pub struct LinearQ {
    pub features: usize,
    pub actions: usize,
    pub params: Vec<f64>,
}

impl LinearQ {
    /// Zero-initialized weights: every state starts at value 0.
    pub fn new(features: usize, actions: usize) -> Self {
        LinearQ { features, actions, params: vec![0.0; features * actions] }
    }

    pub fn row(&self, action: usize) -> &[f64] {
        &self.params[action * self.features..(action + 1) * self.features]
    }

    pub fn q_value(&self, x: &[f64], action: usize) -> f64 {
        self.row(action).iter().zip(x).map(|(w, v)| w * v).sum()
    }

    pub fn q_values(&self, x: &[f64]) -> Vec<f64> {
        (0..self.actions).map(|a| self.q_value(x, a)).collect()
    }

    /// Gradient of the semi-gradient loss ½(target − q(x, a))² with the
    /// target held constant: the chosen action's row gets (q − target)·x,
    /// every other row stays zero.
    pub fn forward_backward(&self, x: &[f64], action: Action, target: f64) -> (Vec<f64>, Vec<f64>) {
        let q = self.q_values(x);
        let mut grads = vec![0.0; self.params.len()];
        let err = q[action.0] - target;
        let row = &mut grads[action.0 * self.features..(action.0 + 1) * self.features];
        for (g, v) in row.iter_mut().zip(x) {
            *g = err * v;
        }
        (q, grads)
    }
}

/// One tabular-style semi-gradient Sarsa(0) update applied in place:
/// `θ_a += α δ x` with `δ = target − q(x, a)` and the bootstrap dropped at
/// terminal transitions. Returns δ.
#[allow(clippy::too_many_arguments)]
pub fn sarsa_linear_update(
    q: &mut LinearQ,
    x: &[f64],
    action: Action,
    reward: f64,
    x_next: &[f64],
    action_next: Action,
    terminal: bool,
    alpha: f64,
    gamma: f64,
) -> Result<f64, LearnError> {
    let target = if terminal { reward } else { reward + gamma * q.q_value(x_next, action_next.0) };
    let delta = target - q.q_value(x, action.0);
    if !delta.is_finite() {
        return Err(LearnError::NonFinite { context: "sarsa temporal-difference error" });
    }
    let features = q.features;
    let row = &mut q.params[action.0 * features..(action.0 + 1) * features];
    for (w, v) in row.iter_mut().zip(x) {
        *w += alpha * delta * v;
    }
    Ok(delta)
}
