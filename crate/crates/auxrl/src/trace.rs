//! Exponentially decaying traces.
//!
//! A trace summarizes a history of preprocessed signals g_0..g_t as
//! m_t = Σ_τ λ^{t−τ} g_τ, maintained incrementally as m ← λ·m + g. Three
//! shapes ship here:
//!
//! * [`trace_update`] / [`DecayingTrace`]: the plain elementwise recursion.
//!   It is exactly the closed-form kernel sum (see [`trace_closed_form`]),
//!   so it is deliberately left unclamped; callers whose signals reset on
//!   observation (the Lobster form) or that clamp per cell (the map form)
//!   stay in [0, 1] by construction.
//! * [`LobsterRewardTrace`]: per-reward-location trace that copies the
//!   "observable and missing" bit while the location is visible and decays
//!   while it is not.
//! * [`MapTrace`]: a per-cell recency matrix over an egocentric map; a cell
//!   holds λ^{Δt} where Δt is the number of steps since it was last visible
//!   (1 when visible now, 0 if never seen).

/// One step of the trace recursion: `m ← λ·m + g`, elementwise.
/// `m` and `g` must have equal length.
pub fn trace_update(m: &mut [f64], g: &[f64], lambda: f64) {
    assert_eq!(m.len(), g.len(), "trace and signal dimension mismatch");
    for (mi, &gi) in m.iter_mut().zip(g) {
        *mi = lambda * *mi + gi;
    }
}

/// Direct evaluation of m_t = Σ_{τ=0..t} λ^{t−τ} g_τ for the final step of
/// `history`. O(t²) over a run if called per step; this is the test oracle
/// for the incremental recursion, not a production path.
pub fn trace_closed_form(history: &[Vec<f64>], lambda: f64) -> Vec<f64> {
    let t = history.len();
    assert!(t > 0, "empty history");
    let dim = history[0].len();
    let mut out = vec![0.0; dim];
    for (tau, g) in history.iter().enumerate() {
        assert_eq!(g.len(), dim);
        let w = lambda.powi((t - 1 - tau) as i32);
        for (o, &gi) in out.iter_mut().zip(g) {
            *o += w * gi;
        }
    }
    out
}

/// Vector trace with a fixed decay.
#[derive(Clone, Debug)]
pub struct DecayingTrace {
    values: Vec<f64>,
    lambda: f64,
}

impl DecayingTrace {
    pub fn new(dim: usize, lambda: f64) -> Self {
        DecayingTrace { values: vec![0.0; dim], lambda }
    }

    pub fn update(&mut self, g: &[f64]) {
        trace_update(&mut self.values, g, self.lambda);
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn reset(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Lobster's per-reward-location trace. While reward location i is
/// unobservable the trace decays, m^i ← λ·m^i; when it is observable the
/// trace copies the "observable and missing" bit of the observation. The
/// copy-on-observation keeps every value inside [0, 1].
///
/// Observation layout (9 features): location one-hot at 0..3, then for each
/// reward i ∈ {1, 2} a triple starting at 3·i: observable-and-missing,
/// observable-and-present, unobservable.
#[derive(Clone, Debug)]
pub struct LobsterRewardTrace {
    m: [f64; 2],
    lambda: f64,
}

impl LobsterRewardTrace {
    pub fn new(lambda: f64) -> Self {
        LobsterRewardTrace { m: [0.0; 2], lambda }
    }

    pub fn update(&mut self, obs: &[f64]) {
        assert!(obs.len() >= 9, "lobster observation has 9 features");
        for i in 0..2 {
            let base = 3 * (i + 1);
            let unobservable = obs[base + 2] != 0.0;
            self.m[i] = if unobservable { self.lambda * self.m[i] } else { obs[base] };
        }
    }

    pub fn values(&self) -> [f64; 2] {
        self.m
    }

    pub fn reset(&mut self) {
        self.m = [0.0; 2];
    }
}

/// Per-cell recency trace over a map: `M ← clamp(λ·M + visibility, 0, 1)`.
/// Supports the egocentric shift that keeps the map agent-centered.
#[derive(Clone, Debug)]
pub struct MapTrace {
    width: usize,
    height: usize,
    grid: Vec<f64>,
    lambda: f64,
}

impl MapTrace {
    pub fn new(width: usize, height: usize, lambda: f64) -> Self {
        MapTrace { width, height, grid: vec![0.0; width * height], lambda }
    }

    /// Decay everything, then clamp `λ·M + mask` into [0, 1]. `mask` holds
    /// 1.0 for cells visible this step and 0.0 otherwise.
    pub fn update(&mut self, visibility: &[f64]) {
        assert_eq!(visibility.len(), self.grid.len());
        for (m, &v) in self.grid.iter_mut().zip(visibility) {
            *m = (self.lambda * *m + v).clamp(0.0, 1.0);
        }
    }

    /// Translate the stored grid by (dx, dy) cells; vacated cells become 0
    /// (never observed). Called when the agent moves so cell (x, y) keeps
    /// describing the same world location relative to the agent.
    pub fn shift(&mut self, dx: i64, dy: i64) {
        if dx == 0 && dy == 0 {
            return;
        }
        let (w, h) = (self.width as i64, self.height as i64);
        let mut next = vec![0.0; self.grid.len()];
        for y in 0..h {
            for x in 0..w {
                let (sx, sy) = (x + dx, y + dy);
                if sx >= 0 && sx < w && sy >= 0 && sy < h {
                    next[(y * w + x) as usize] = self.grid[(sy * w + sx) as usize];
                }
            }
        }
        self.grid = next;
    }

    pub fn values(&self) -> &[f64] {
        &self.grid
    }

    pub fn reset(&mut self) {
        self.grid.iter_mut().for_each(|v| *v = 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn decay_from_one() {
        // m = 1, two decay-only steps at λ = 0.9.
        let mut m = [1.0];
        trace_update(&mut m, &[0.0], 0.9);
        trace_update(&mut m, &[0.0], 0.9);
        assert_abs_diff_eq!(m[0], 0.81, epsilon = 1e-15);
    }

    #[test]
    fn zero_lambda_reduces_to_last_signal() {
        let mut m = [0.7];
        trace_update(&mut m, &[0.3], 0.0);
        assert_eq!(m[0], 0.3);
    }

    #[test]
    fn event_sets_trace_to_one() {
        let mut m = [0.0];
        trace_update(&mut m, &[1.0], 0.9);
        assert_eq!(m[0], 1.0);
    }

    #[test]
    fn recursion_matches_closed_form_over_random_histories() {
        // The incremental recursion must agree with the direct kernel sum to
        // 1e-12 for every λ in the sweep over random binary histories.
        let lambdas = [0.0, 0.65, 0.85, 0.9, 0.95, 1.0];
        let mut rng = RngStream::from_seed(2024);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let history: Vec<Vec<f64>> =
                (0..200).map(|_| vec![if rng.bernoulli(0.3) { 1.0 } else { 0.0 }]).collect();
            for &lambda in &lambdas {
                let mut m = vec![0.0];
                for g in &history {
                    trace_update(&mut m, g, lambda);
                }
                let direct = trace_closed_form(&history, lambda);
                worst = worst.max((m[0] - direct[0]).abs());
            }
        }
        assert!(worst < 1e-12, "max |recursion - closed form| = {worst}");
    }

    #[test]
    fn lobster_trace_decays_while_unobservable() {
        // Observation triples: reward 1 at 3..6, reward 2 at 6..9.
        let at_l1_missing = [0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let at_l0 = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        let mut tr = LobsterRewardTrace::new(0.9);
        tr.update(&at_l1_missing);
        assert_eq!(tr.values()[0], 1.0);
        for _ in 0..3 {
            tr.update(&at_l0);
        }
        assert_abs_diff_eq!(tr.values()[0], 0.9f64.powi(3), epsilon = 1e-15);
        assert_eq!(tr.values()[1], 0.0, "never-observed reward stays at 0");
    }

    #[test]
    fn lobster_trace_clears_on_present() {
        let at_l1_present = [0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let mut tr = LobsterRewardTrace::new(0.9);
        tr.m = [0.5, 0.0];
        tr.update(&at_l1_present);
        assert_eq!(tr.values()[0], 0.0);
    }

    #[test]
    fn map_trace_is_lambda_to_the_gap() {
        let mut map = MapTrace::new(3, 3, 0.95);
        assert_eq!(map.values()[4], 0.0, "never-seen cell");
        let mut mask = vec![0.0; 9];
        mask[4] = 1.0;
        map.update(&mask);
        assert_eq!(map.values()[4], 1.0, "visible now");
        let blank = vec![0.0; 9];
        for _ in 0..5 {
            map.update(&blank);
        }
        assert_abs_diff_eq!(map.values()[4], 0.95f64.powi(5), epsilon = 1e-15);
    }

    #[test]
    fn map_trace_clamps_at_one() {
        let mut map = MapTrace::new(1, 1, 0.95);
        let mask = vec![1.0];
        map.update(&mask);
        map.update(&mask);
        assert_eq!(map.values()[0], 1.0);
    }

    #[test]
    fn map_shift_moves_cells_and_blanks_the_edge() {
        // shift(dx, dy) pulls cell contents from (x+dx, y+dy): after the
        // agent moves +1 in x, old (1,0) lands at (0,0) and the vacated
        // column reads as never-observed.
        let mut map = MapTrace::new(3, 3, 0.9);
        let mut mask = vec![0.0; 9];
        mask[1] = 1.0; // cell (1,0)
        map.update(&mask);
        map.shift(1, 0);
        assert_eq!(map.values()[0], 1.0, "content followed the shift");
        assert_eq!(map.values()[1], 0.0);
        assert_eq!(map.values()[2], 0.0, "vacated edge is blank");
    }
}
