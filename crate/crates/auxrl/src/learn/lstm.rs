use super::adam::{Optimizer, Precision};
use super::LearnError;
use crate::rng::RngStream;
use crate::state::{HiddenSnapshot, TransitionRecord};

/// Gated recurrent action-value network: a single LSTM-style cell (input,
/// forget, output gates and a tanh candidate) followed by a linear head.
///
/// Parameters are one flat vector: for each gate in the order input,
/// forget, output, candidate a block [W (hidden × input), U (hidden ×
/// hidden), b (hidden)], then the head [W_out (output × hidden), b_out].
///
/// Training consumes windows of [`TransitionRecord`]s sampled from replay
/// (or a rolling online window): the forward pass warm-starts from the
/// hidden snapshot stored with the window's first record, bootstrapped
/// targets are computed first and frozen, and gradients stop at the window
/// start.
#[derive(Clone, Debug)]
pub struct RecurrentQ {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    pub params: Vec<f64>,
}

const GATES: usize = 4;

struct StepCache {
    h_in: Vec<f64>,
    c_in: Vec<f64>,
    gates: [Vec<f64>; GATES],
    tanh_c: Vec<f64>,
    h_out: Vec<f64>,
    q: Vec<f64>,
}

impl RecurrentQ {
    fn gate_block(&self) -> usize {
        self.hidden_dim * self.input_dim + self.hidden_dim * self.hidden_dim + self.hidden_dim
    }

    pub fn param_count(input: usize, hidden: usize, output: usize) -> usize {
        GATES * (hidden * input + hidden * hidden + hidden) + output * hidden + output
    }

    /// Gate weights uniform in ±1/√fan-in (inputs and recurrent weights use
    /// their own fan-in), biases zero.
    pub fn new(input: usize, hidden: usize, output: usize, rng: &mut RngStream) -> Self {
        let mut params = vec![0.0; Self::param_count(input, hidden, output)];
        let block = hidden * input + hidden * hidden + hidden;
        let w_scale = 1.0 / (input as f64).sqrt();
        let u_scale = 1.0 / (hidden as f64).sqrt();
        for gate in 0..GATES {
            let base = gate * block;
            for p in &mut params[base..base + hidden * input] {
                *p = rng.uniform(-w_scale, w_scale);
            }
            let u = base + hidden * input;
            for p in &mut params[u..u + hidden * hidden] {
                *p = rng.uniform(-u_scale, u_scale);
            }
        }
        let head = GATES * block;
        for p in &mut params[head..head + output * hidden] {
            *p = rng.uniform(-u_scale, u_scale);
        }
        RecurrentQ { input_dim: input, hidden_dim: hidden, output_dim: output, params }
    }

    pub fn zero_state(&self) -> HiddenSnapshot {
        HiddenSnapshot { h: vec![0.0; self.hidden_dim], c: vec![0.0; self.hidden_dim] }
    }

    fn gate_slices(&self, gate: usize) -> (&[f64], &[f64], &[f64]) {
        let block = self.gate_block();
        let base = gate * block;
        let w = &self.params[base..base + self.hidden_dim * self.input_dim];
        let u_start = base + self.hidden_dim * self.input_dim;
        let u = &self.params[u_start..u_start + self.hidden_dim * self.hidden_dim];
        let b = &self.params[u_start + self.hidden_dim * self.hidden_dim..base + block];
        (w, u, b)
    }

    fn head_slices(&self) -> (&[f64], &[f64]) {
        let head = GATES * self.gate_block();
        let w = &self.params[head..head + self.output_dim * self.hidden_dim];
        let b = &self.params[head + self.output_dim * self.hidden_dim..];
        (w, b)
    }

    fn forward_cell(&self, x: &[f64], state: &HiddenSnapshot) -> StepCache {
        let hd = self.hidden_dim;
        let id = self.input_dim;
        let mut gates: [Vec<f64>; GATES] = Default::default();
        for (gate, slot) in gates.iter_mut().enumerate() {
            let (w, u, b) = self.gate_slices(gate);
            let pre: Vec<f64> = (0..hd)
                .map(|j| {
                    b[j]
                        + w[j * id..(j + 1) * id].iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
                        + u[j * hd..(j + 1) * hd]
                            .iter()
                            .zip(&state.h)
                            .map(|(w, v)| w * v)
                            .sum::<f64>()
                })
                .collect();
            // Candidate gate is tanh, the rest are logistic.
            *slot = if gate == 3 {
                pre.iter().map(|p| p.tanh()).collect()
            } else {
                pre.iter().map(|p| 1.0 / (1.0 + (-p).exp())).collect()
            };
        }
        let c_out: Vec<f64> = (0..hd)
            .map(|j| gates[1][j] * state.c[j] + gates[0][j] * gates[3][j])
            .collect();
        let tanh_c: Vec<f64> = c_out.iter().map(|c| c.tanh()).collect();
        let h_out: Vec<f64> = (0..hd).map(|j| gates[2][j] * tanh_c[j]).collect();
        let (w_out, b_out) = self.head_slices();
        let q: Vec<f64> = (0..self.output_dim)
            .map(|a| {
                b_out[a]
                    + w_out[a * hd..(a + 1) * hd]
                        .iter()
                        .zip(&h_out)
                        .map(|(w, v)| w * v)
                        .sum::<f64>()
            })
            .collect();
        StepCache {
            h_in: state.h.clone(),
            c_in: state.c.clone(),
            gates,
            tanh_c,
            h_out,
            q,
        }
    }

    /// One acting step: q-values for the new input and the advanced state.
    pub fn step(&self, x: &[f64], state: &HiddenSnapshot) -> (Vec<f64>, HiddenSnapshot) {
        let cache = self.forward_cell(x, state);
        let hd = self.hidden_dim;
        let c: Vec<f64> = (0..hd)
            .map(|j| cache.gates[1][j] * cache.c_in[j] + cache.gates[0][j] * cache.gates[3][j])
            .collect();
        (cache.q, HiddenSnapshot { h: cache.h_out, c })
    }

    fn snapshot_of(window: &[&TransitionRecord]) -> HiddenSnapshot {
        window[0].hidden.clone().expect("recurrent windows carry a hidden snapshot")
    }

    /// Bootstrapped Sarsa targets for a window, computed with the current
    /// parameters and then treated as constants. The final step looks one
    /// transition past the window (the stored next input and next action)
    /// unless it is terminal.
    pub fn window_targets(&self, window: &[&TransitionRecord], gamma: f64) -> Vec<f64> {
        debug_assert!(window.iter().rev().skip(1).all(|r| !r.terminal));
        let mut state = Self::snapshot_of(window);
        let mut qs = Vec::with_capacity(window.len() + 1);
        for rec in window {
            let (q, next) = self.step(&rec.x.0, &state);
            qs.push(q);
            state = next;
        }
        let last = window.last().expect("non-empty window");
        if !last.terminal {
            let (q, _) = self.step(&last.x_next.0, &state);
            qs.push(q);
        }
        window
            .iter()
            .enumerate()
            .map(|(t, rec)| {
                if rec.terminal {
                    rec.reward
                } else {
                    rec.reward + gamma * qs[t + 1][rec.action_next.0]
                }
            })
            .collect()
    }

    /// Loss and parameter gradient of ½ Σ_t (q(x_t, a_t) − target_t)² over
    /// the unrolled window, gradients truncated at the stored snapshot.
    pub fn window_loss_grads(
        &self,
        window: &[&TransitionRecord],
        targets: &[f64],
    ) -> (f64, Vec<f64>) {
        assert_eq!(window.len(), targets.len());
        let hd = self.hidden_dim;
        let id = self.input_dim;
        let block = self.gate_block();
        let head = GATES * block;

        let mut state = Self::snapshot_of(window);
        let mut caches = Vec::with_capacity(window.len());
        for rec in window {
            let cache = self.forward_cell(&rec.x.0, &state);
            state = HiddenSnapshot {
                h: cache.h_out.clone(),
                c: (0..hd)
                    .map(|j| cache.gates[1][j] * cache.c_in[j] + cache.gates[0][j] * cache.gates[3][j])
                    .collect(),
            };
            caches.push(cache);
        }

        let mut loss = 0.0;
        let mut grads = vec![0.0; self.params.len()];
        let (w_out, _) = self.head_slices();
        let mut dh_next = vec![0.0; hd];
        let mut dc_next = vec![0.0; hd];
        for t in (0..window.len()).rev() {
            let cache = &caches[t];
            let rec = window[t];
            let a = rec.action.0;
            let err = cache.q[a] - targets[t];
            loss += 0.5 * err * err;

            // Head: only the taken action's row sees the error.
            for j in 0..hd {
                grads[head + a * hd + j] += err * cache.h_out[j];
            }
            grads[head + self.output_dim * hd + a] += err;

            let mut dh = dh_next.clone();
            for j in 0..hd {
                dh[j] += err * w_out[a * hd + j];
            }
            let mut dc = dc_next.clone();
            for j in 0..hd {
                dc[j] += dh[j] * cache.gates[2][j] * (1.0 - cache.tanh_c[j] * cache.tanh_c[j]);
            }

            let (gi, gf, go, gg) = (
                &cache.gates[0],
                &cache.gates[1],
                &cache.gates[2],
                &cache.gates[3],
            );
            let dpre: [Vec<f64>; GATES] = [
                (0..hd).map(|j| dc[j] * gg[j] * gi[j] * (1.0 - gi[j])).collect(),
                (0..hd).map(|j| dc[j] * cache.c_in[j] * gf[j] * (1.0 - gf[j])).collect(),
                (0..hd).map(|j| dh[j] * cache.tanh_c[j] * go[j] * (1.0 - go[j])).collect(),
                (0..hd).map(|j| dc[j] * gi[j] * (1.0 - gg[j] * gg[j])).collect(),
            ];

            let mut dh_prev = vec![0.0; hd];
            for (gate, dpre_gate) in dpre.iter().enumerate() {
                let base = gate * block;
                let u_off = base + hd * id;
                let b_off = u_off + hd * hd;
                let (_, u, _) = self.gate_slices(gate);
                for j in 0..hd {
                    let d = dpre_gate[j];
                    if d == 0.0 {
                        continue;
                    }
                    for (k, &v) in rec.x.0.iter().enumerate() {
                        grads[base + j * id + k] += d * v;
                    }
                    for (m, &v) in cache.h_in.iter().enumerate() {
                        grads[u_off + j * hd + m] += d * v;
                        dh_prev[m] += u[j * hd + m] * d;
                    }
                    grads[b_off + j] += d;
                }
            }
            dh_next = dh_prev;
            dc_next = (0..hd).map(|j| dc[j] * gf[j]).collect();
        }
        (loss, grads)
    }
}

/// One truncated-BPTT update from a replay (or rolling) window: freeze the
/// bootstrap targets, differentiate the window loss, take one optimizer
/// step. Returns the window loss.
pub fn tbptt_update(
    net: &mut RecurrentQ,
    window: &[&TransitionRecord],
    gamma: f64,
    optimizer: &mut Optimizer,
    precision: Precision,
) -> Result<f64, LearnError> {
    let targets = net.window_targets(window, gamma);
    let (loss, grads) = net.window_loss_grads(window, &targets);
    let mut params = std::mem::take(&mut net.params);
    let result = optimizer.step(&mut params, &grads, precision);
    net.params = params;
    result?;
    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Action, AgentStateVector};

    fn record(
        x: Vec<f64>,
        action: usize,
        reward: f64,
        x_next: Vec<f64>,
        action_next: usize,
        terminal: bool,
        hidden: Option<HiddenSnapshot>,
    ) -> TransitionRecord {
        TransitionRecord {
            x: AgentStateVector(x),
            action: Action(action),
            reward,
            x_next: AgentStateVector(x_next),
            action_next: Action(action_next),
            terminal,
            hidden,
        }
    }

    fn random_window(
        net: &RecurrentQ,
        len: usize,
        terminal_last: bool,
        rng: &mut RngStream,
    ) -> Vec<TransitionRecord> {
        let xs: Vec<Vec<f64>> = (0..=len)
            .map(|_| (0..net.input_dim).map(|_| rng.uniform(-1.0, 1.0)).collect())
            .collect();
        let snapshot = HiddenSnapshot {
            h: (0..net.hidden_dim).map(|_| rng.uniform(-0.5, 0.5)).collect(),
            c: (0..net.hidden_dim).map(|_| rng.uniform(-0.5, 0.5)).collect(),
        };
        let mut recs = Vec::new();
        for t in 0..len {
            recs.push(record(
                xs[t].clone(),
                rng.below(net.output_dim),
                rng.uniform(-1.0, 1.0),
                xs[t + 1].clone(),
                rng.below(net.output_dim),
                terminal_last && t == len - 1,
                if t == 0 { Some(snapshot.clone()) } else { None },
            ));
        }
        recs
    }

    #[test]
    fn step_advances_the_state_deterministically() {
        let mut rng = RngStream::from_seed(31);
        let net = RecurrentQ::new(3, 4, 2, &mut rng);
        let s0 = net.zero_state();
        let x = [0.1, -0.2, 0.3];
        let (q1, s1) = net.step(&x, &s0);
        let (q2, _) = net.step(&x, &s0);
        assert_eq!(q1, q2);
        let (q3, _) = net.step(&x, &s1);
        assert_ne!(q1, q3, "state advanced, values change");
    }

    #[test]
    fn zero_head_means_zero_loss_and_zero_grads_with_zero_rewards() {
        let mut rng = RngStream::from_seed(32);
        let mut net = RecurrentQ::new(3, 4, 2, &mut rng);
        let head = GATES * net.gate_block();
        for p in &mut net.params[head..] {
            *p = 0.0;
        }
        let mut recs = random_window(&net, 3, false, &mut rng);
        for r in &mut recs {
            r.reward = 0.0;
        }
        let window: Vec<&TransitionRecord> = recs.iter().collect();
        let targets = net.window_targets(&window, 0.9);
        assert!(targets.iter().all(|&t| t == 0.0));
        let (loss, grads) = net.window_loss_grads(&window, &targets);
        assert_eq!(loss, 0.0);
        assert!(grads.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn terminal_window_targets_drop_the_bootstrap() {
        let mut rng = RngStream::from_seed(33);
        let net = RecurrentQ::new(3, 4, 2, &mut rng);
        let recs = random_window(&net, 3, true, &mut rng);
        let window: Vec<&TransitionRecord> = recs.iter().collect();
        let targets = net.window_targets(&window, 0.9);
        assert_eq!(targets[2], recs[2].reward);
    }

    /// Finite differences with the targets frozen at the base parameters:
    /// exactly the semi-gradient quantity the backward pass claims.
    fn fd_worst(net: &RecurrentQ, window: &[&TransitionRecord], gamma: f64) -> f64 {
        let targets = net.window_targets(window, gamma);
        let (_, grads) = net.window_loss_grads(window, &targets);
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for p in 0..net.params.len() {
            let mut plus = net.clone();
            plus.params[p] += h;
            let mut minus = net.clone();
            minus.params[p] -= h;
            let (lp, _) = plus.window_loss_grads(window, &targets);
            let (lm, _) = minus.window_loss_grads(window, &targets);
            let fd = (lp - lm) / (2.0 * h);
            let denom = grads[p].abs().max(fd.abs()).max(1.0);
            worst = worst.max((grads[p] - fd).abs() / denom);
        }
        worst
    }

    #[test]
    fn unrolled_gradients_match_finite_differences() {
        let mut rng = RngStream::from_seed(34);
        for round in 0..6 {
            let net = RecurrentQ::new(3, 4, 2, &mut rng);
            let recs = random_window(&net, 3, round % 2 == 0, &mut rng);
            let window: Vec<&TransitionRecord> = recs.iter().collect();
            let worst = fd_worst(&net, &window, 0.9);
            assert!(worst < 1e-4, "round {round}: max relative error {worst}");
        }
    }

    #[test]
    fn single_step_window_gradients_also_match() {
        let mut rng = RngStream::from_seed(35);
        let net = RecurrentQ::new(4, 5, 3, &mut rng);
        let recs = random_window(&net, 1, false, &mut rng);
        let window: Vec<&TransitionRecord> = recs.iter().collect();
        let worst = fd_worst(&net, &window, 0.95);
        assert!(worst < 1e-4, "max relative error {worst}");
    }

    #[test]
    fn tbptt_update_descends_the_window_loss() {
        let mut rng = RngStream::from_seed(36);
        let mut net = RecurrentQ::new(3, 6, 2, &mut rng);
        let recs = random_window(&net, 3, false, &mut rng);
        let window: Vec<&TransitionRecord> = recs.iter().collect();
        let targets = net.window_targets(&window, 0.9);
        let (before, _) = net.window_loss_grads(&window, &targets);
        let mut opt = Optimizer::sgd(1e-2);
        tbptt_update(&mut net, &window, 0.9, &mut opt, Precision::F64).unwrap();
        let (after, _) = net.window_loss_grads(&window, &targets);
        assert!(after < before, "loss went {before} -> {after}");
    }
}
