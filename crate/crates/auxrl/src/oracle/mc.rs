use super::mdp::TabularMdp;
use crate::rng::RngStream;

/// Monte-Carlo estimate of a policy's return.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub mean: f64,
    /// Standard error of the mean (0 for a single run).
    pub se: f64,
    pub returns: Vec<f64>,
}

impl Evaluation {
    pub fn from_returns(returns: Vec<f64>) -> Self {
        let n = returns.len() as f64;
        let mean = returns.iter().sum::<f64>() / n;
        let se = if returns.len() > 1 {
            let var =
                returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Evaluation { mean, se, returns }
    }
}

/// Roll out a fixed policy on the tabular model. Each run starts from the
/// start distribution and lasts `horizon` steps or until a terminal state.
/// `discount = None` accumulates undiscounted return (the convention for the
/// continuing segments this backs).
pub fn mc_evaluate(
    mdp: &TabularMdp,
    policy: &[usize],
    runs: usize,
    horizon: usize,
    discount: Option<f64>,
    rng: &mut RngStream,
) -> Evaluation {
    assert_eq!(policy.len(), mdp.state_count);
    let returns = (0..runs)
        .map(|_| {
            let start_weights: Vec<f64> = mdp.start.clone();
            let mut state = sample(&start_weights, rng);
            let mut total = 0.0;
            let mut weight = 1.0;
            for _ in 0..horizon {
                if mdp.terminal[state] {
                    break;
                }
                let row = &mdp.edges[state][policy[state]];
                let probs: Vec<f64> = row.iter().map(|e| e.probability).collect();
                let edge = &row[sample(&probs, rng)];
                total += weight * edge.reward;
                if let Some(g) = discount {
                    weight *= g;
                }
                state = edge.next;
            }
            total
        })
        .collect();
    Evaluation::from_returns(returns)
}

fn sample(weights: &[f64], rng: &mut RngStream) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.unit_f64() * total;
    for (i, &p) in weights.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        u -= p;
        if u <= 0.0 {
            return i;
        }
    }
    weights.iter().rposition(|&p| p > 0.0).expect("non-empty distribution")
}
