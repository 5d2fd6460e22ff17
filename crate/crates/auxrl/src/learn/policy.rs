use super::LearnError;
use crate::rng::RngStream;
use crate::state::Action;

/// ε-greedy action selection: with probability ε a uniformly random action,
/// otherwise the argmax with ties broken uniformly at random.
pub fn epsilon_greedy(
    q_values: &[f64],
    epsilon: f64,
    rng: &mut RngStream,
) -> Result<Action, LearnError> {
    if q_values.is_empty() {
        return Err(LearnError::NoActions);
    }
    debug_assert!((0.0..=1.0).contains(&epsilon));
    if rng.unit_f64() < epsilon {
        return Ok(Action(rng.below(q_values.len())));
    }
    let best = q_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = q_values
        .iter()
        .enumerate()
        .filter(|&(_, &q)| q == best)
        .map(|(i, _)| i)
        .collect();
    Ok(Action(tied[rng.below(tied.len())]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_epsilon_is_pure_greedy() {
        let mut rng = RngStream::from_seed(11);
        for _ in 0..100 {
            let a = epsilon_greedy(&[1.0, 2.0, 3.0], 0.0, &mut rng).unwrap();
            assert_eq!(a, Action(2));
        }
    }

    #[test]
    fn empty_q_vector_is_an_error() {
        let mut rng = RngStream::from_seed(11);
        assert!(matches!(epsilon_greedy(&[], 0.5, &mut rng), Err(LearnError::NoActions)));
    }

    #[test]
    fn full_epsilon_is_uniform() {
        let mut rng = RngStream::from_seed(12);
        let mut counts = [0u32; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[epsilon_greedy(&[5.0, 1.0, 1.0, 1.0], 1.0, &mut rng).unwrap().0] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn mixture_frequencies_match_the_policy() {
        // ε = 0.1 over 3 actions: greedy gets 0.9 + ε/3, the others ε/3.
        let mut rng = RngStream::from_seed(13);
        let mut counts = [0u32; 3];
        let n = 100_000;
        for _ in 0..n {
            counts[epsilon_greedy(&[0.0, 2.0, -1.0], 0.1, &mut rng).unwrap().0] += 1;
        }
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        assert!((freq[1] - (0.9 + 0.1 / 3.0)).abs() < 0.005);
        assert!((freq[0] - 0.1 / 3.0).abs() < 0.005);
        assert!((freq[2] - 0.1 / 3.0).abs() < 0.005);
    }

    #[test]
    fn exact_ties_split_uniformly() {
        let mut rng = RngStream::from_seed(14);
        let mut counts = [0u32; 3];
        let n = 100_000;
        for _ in 0..n {
            counts[epsilon_greedy(&[7.0, 3.0, 7.0], 0.0, &mut rng).unwrap().0] += 1;
        }
        assert_eq!(counts[1], 0);
        assert!((counts[0] as f64 / n as f64 - 0.5).abs() < 0.01);
        assert!((counts[2] as f64 / n as f64 - 0.5).abs() < 0.01);
    }
}
