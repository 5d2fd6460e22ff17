//! Hand-derived likelihood predictor for the Lobster environment.
//!
//! Pot regeneration is a per-step Bernoulli event with probability
//! 1 − exp(−r), r = 1/Λ, so after τ steps without collection the probability
//! a once-empty pot has refilled is 1 − exp(−τ·r). The predictor feeds the
//! agent, per reward location, the probability that the pot would be full
//! *by the time the agent could reach it*: τ counts the steps since the pot
//! was last observed missing plus the expected travel time from the current
//! location under the direct go-there policy.

/// Expected travel steps between Lobster locations under the policy that
/// heads straight for the target; moves succeed with probability `p_move`,
/// so each hop costs 1/p_move expected steps and the far location costs two
/// hops.
pub fn lobster_travel_steps(p_move: f64) -> [[f64; 2]; 3] {
    let hop = 1.0 / p_move;
    // Row = current location (L0, L1, L2), column = reward location (L1, L2).
    [[hop, hop], [0.0, 2.0 * hop], [2.0 * hop, 0.0]]
}

/// Per-reward regeneration-likelihood state.
#[derive(Clone, Debug)]
pub struct LobsterLikelihood {
    /// Steps since reward i was last observed missing; `None` until the
    /// first such observation (the pot has never been seen empty).
    steps_since_missing: [Option<u64>; 2],
    rate: f64,
    travel: [[f64; 2]; 3],
}

impl LobsterLikelihood {
    /// `rate` is 1/Λ, the per-step event rate of the regeneration process.
    pub fn new(rate: f64, p_move: f64) -> Self {
        LobsterLikelihood {
            steps_since_missing: [None; 2],
            rate,
            travel: lobster_travel_steps(p_move),
        }
    }

    /// Advance one step on a fresh observation and return the two
    /// likelihood features.
    ///
    /// Per reward i: observed missing resets the counter; observed present
    /// pins the feature at 1 (a full pot stays full until collected); while
    /// unobservable the feature is 1 − exp(−(counter + travel)·rate).
    pub fn update(&mut self, obs: &[f64]) -> [f64; 2] {
        assert!(obs.len() >= 9, "lobster observation has 9 features");
        let location = obs[..3]
            .iter()
            .position(|&v| v != 0.0)
            .expect("lobster observation encodes a location");
        let mut out = [0.0; 2];
        for i in 0..2 {
            let base = 3 * (i + 1);
            let missing = obs[base] != 0.0;
            let present = obs[base + 1] != 0.0;
            self.steps_since_missing[i] = if missing {
                Some(0)
            } else {
                self.steps_since_missing[i].map(|c| c + 1)
            };
            out[i] = if present {
                1.0
            } else {
                match self.steps_since_missing[i] {
                    None => 1.0,
                    Some(counter) => {
                        let tau = counter as f64 + self.travel[location][i];
                        1.0 - (-tau * self.rate).exp()
                    }
                }
            };
        }
        out
    }

    pub fn reset(&mut self) {
        self.steps_since_missing = [None; 2];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    const AT_L0: [f64; 9] = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
    const AT_L1_MISSING: [f64; 9] = [0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    const AT_L1_PRESENT: [f64; 9] = [0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];

    #[test]
    fn travel_table_matches_hop_counts() {
        let t = lobster_travel_steps(0.6);
        assert_abs_diff_eq!(t[0][0], 1.0 / 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(t[2][0], 2.0 / 0.6, epsilon = 1e-15);
        assert_eq!(t[1][0], 0.0);
    }

    #[test]
    fn counter_ladder_from_l0() {
        // Observe missing at L1, then sit at L0 for 8 further steps: the
        // counter reads 8 and travel adds 1/0.6 expected steps.
        let mut lk = LobsterLikelihood::new(0.1, 0.6);
        lk.update(&AT_L1_MISSING);
        let mut feat = [0.0; 2];
        for _ in 0..8 {
            feat = lk.update(&AT_L0);
        }
        let expect = 1.0 - (-(8.0 + 1.0 / 0.6) * 0.1_f64).exp();
        assert_abs_diff_eq!(feat[0], expect, epsilon = 1e-12);
        assert_abs_diff_eq!(feat[0], 0.6197, epsilon = 5e-4);
    }

    #[test]
    fn missing_now_reads_zero_present_reads_one() {
        let mut lk = LobsterLikelihood::new(0.1, 0.6);
        let f = lk.update(&AT_L1_MISSING);
        assert_eq!(f[0], 0.0, "just observed missing, zero travel");
        let f = lk.update(&AT_L1_PRESENT);
        assert_eq!(f[0], 1.0);
    }

    #[test]
    fn never_seen_missing_reads_one() {
        // Pots start full, so before any missing observation the likelihood
        // of presence is pinned at 1.
        let mut lk = LobsterLikelihood::new(0.1, 0.6);
        let f = lk.update(&AT_L0);
        assert_eq!(f, [1.0, 1.0]);
    }

    #[test]
    fn feature_is_monotone_in_elapsed_steps_and_below_one() {
        let mut lk = LobsterLikelihood::new(0.1, 0.6);
        lk.update(&AT_L1_MISSING);
        let mut last = 0.0;
        for _ in 0..200 {
            let f = lk.update(&AT_L0);
            assert!(f[0] > last && f[0] < 1.0);
            last = f[0];
        }
    }

    /// Independent Monte-Carlo check of the formula's semantics: simulate
    /// the pot regenerating with per-step probability 1 − exp(−rate) over
    /// (counter + random geometric travel) steps and compare the empirical
    /// refill probability (the formula substitutes the expected travel time
    /// into the exponent; the gap is well inside ±0.01 at these rates).
    #[test]
    fn formula_matches_regeneration_simulation() {
        let rate: f64 = 0.1;
        let p_move = 0.6;
        let counter = 8u64;
        let p_regen = 1.0 - (-rate).exp();
        let mut rng = RngStream::from_seed(77);
        let trials = 1_000_000;
        let mut refilled = 0u64;
        for _ in 0..trials {
            let mut travel = 0u64;
            while !rng.bernoulli(p_move) {
                travel += 1;
            }
            travel += 1; // the successful hop itself
            let total = counter + travel;
            if (0..total).any(|_| rng.bernoulli(p_regen)) {
                refilled += 1;
            }
        }
        let mc = refilled as f64 / trials as f64;
        let formula = 1.0 - (-(counter as f64 + 1.0 / p_move) * rate).exp();
        assert!((mc - formula).abs() < 0.01, "mc {mc} vs formula {formula}");
    }
}
