use super::mdp::{OracleError, TabularMdp};

/// Output of [`value_iteration`].
#[derive(Clone, Debug)]
pub struct Solution {
    pub values: Vec<f64>,
    /// Greedy action per state; ties resolve to the lowest action index.
    pub policy: Vec<usize>,
    pub iterations: usize,
    /// Final Bellman residual `max_s |V(s) - (BV)(s)|`.
    pub residual: f64,
}

/// Synchronous value iteration to a fixed point. Each sweep applies the full
/// Bellman optimality backup to the previous sweep's values, so when the
/// sweep-to-sweep change drops below `theta` the returned values satisfy
/// `max_s |V - BV| < gamma * theta <= theta`.
pub fn value_iteration(mdp: &TabularMdp, theta: f64) -> Result<Solution, OracleError> {
    if !(0.0..1.0).contains(&mdp.gamma) {
        return Err(OracleError::BadDiscount(mdp.gamma));
    }
    if theta <= 0.0 {
        return Err(OracleError::BadThreshold(theta));
    }
    let n = mdp.state_count;
    let mut values = vec![0.0; n];
    let mut iterations = 0;
    loop {
        let (next, delta) = backup(mdp, &values);
        values = next;
        iterations += 1;
        if delta < theta {
            break;
        }
    }
    let (_, residual) = backup(mdp, &values);
    let policy = (0..n).map(|s| greedy_action(mdp, s, &values)).collect();
    Ok(Solution { values, policy, iterations, residual })
}

fn backup(mdp: &TabularMdp, values: &[f64]) -> (Vec<f64>, f64) {
    let mut next = vec![0.0; mdp.state_count];
    let mut delta: f64 = 0.0;
    for s in 0..mdp.state_count {
        if mdp.terminal[s] {
            continue;
        }
        let best = (0..mdp.action_count)
            .map(|a| mdp.q_value(s, a, values))
            .fold(f64::NEG_INFINITY, f64::max);
        delta = delta.max((best - values[s]).abs());
        next[s] = best;
    }
    (next, delta)
}

fn greedy_action(mdp: &TabularMdp, state: usize, values: &[f64]) -> usize {
    let mut best = 0;
    let mut best_q = f64::NEG_INFINITY;
    for a in 0..mdp.action_count {
        let q = mdp.q_value(state, a, values);
        if q > best_q {
            best_q = q;
            best = a;
        }
    }
    best
}
