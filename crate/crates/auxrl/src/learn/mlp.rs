use crate::rng::RngStream;
use crate::state::Action;

/// One-hidden-layer action-value network: `q = W2 · relu(W1 x + b1) + b2`.
/// Parameters are one flat vector in the order W1 (hidden × input, row
/// major), b1, W2 (output × hidden), b2.
#[derive(Clone, Debug)]
pub struct MlpQ {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    pub params: Vec<f64>,
}

impl MlpQ {
    pub fn param_count(input: usize, hidden: usize, output: usize) -> usize {
        hidden * input + hidden + output * hidden + output
    }

    /// Weights uniform in ±1/√fan-in, biases zero.
    pub fn new(input: usize, hidden: usize, output: usize, rng: &mut RngStream) -> Self {
        let mut params = vec![0.0; Self::param_count(input, hidden, output)];
        let w1_scale = 1.0 / (input as f64).sqrt();
        for p in &mut params[..hidden * input] {
            *p = rng.uniform(-w1_scale, w1_scale);
        }
        let w2_start = hidden * input + hidden;
        let w2_scale = 1.0 / (hidden as f64).sqrt();
        for p in &mut params[w2_start..w2_start + output * hidden] {
            *p = rng.uniform(-w2_scale, w2_scale);
        }
        MlpQ { input_dim: input, hidden_dim: hidden, output_dim: output, params }
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        let (i, h, o) = (self.input_dim, self.hidden_dim, self.output_dim);
        let (w1, rest) = self.params.split_at(h * i);
        let (b1, rest) = rest.split_at(h);
        let (w2, b2) = rest.split_at(o * h);
        (w1, b1, w2, b2)
    }

    fn hidden(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (w1, b1, _, _) = self.split();
        let i = self.input_dim;
        let pre: Vec<f64> = (0..self.hidden_dim)
            .map(|j| b1[j] + w1[j * i..(j + 1) * i].iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect();
        let act = pre.iter().map(|&p| p.max(0.0)).collect();
        (pre, act)
    }

    pub fn q_values(&self, x: &[f64]) -> Vec<f64> {
        let (_, _, w2, b2) = self.split();
        let (_, h) = self.hidden(x);
        let hd = self.hidden_dim;
        (0..self.output_dim)
            .map(|a| b2[a] + w2[a * hd..(a + 1) * hd].iter().zip(&h).map(|(w, v)| w * v).sum::<f64>())
            .collect()
    }

    /// Semi-gradient loss ½(target − q(x, a))² with the target constant:
    /// returns the q-vector and the gradient, laid out like `params`.
    pub fn forward_backward(&self, x: &[f64], action: Action, target: f64) -> (Vec<f64>, Vec<f64>) {
        let (i, hd, o) = (self.input_dim, self.hidden_dim, self.output_dim);
        let (_, _, w2, b2) = self.split();
        let (pre, h) = self.hidden(x);
        let q: Vec<f64> = (0..o)
            .map(|a| b2[a] + w2[a * hd..(a + 1) * hd].iter().zip(&h).map(|(w, v)| w * v).sum::<f64>())
            .collect();

        let err = q[action.0] - target;
        let mut grads = vec![0.0; self.params.len()];
        let w2_off = hd * i + hd;
        let b2_off = w2_off + o * hd;
        // Output layer: only the chosen action's row carries error.
        for j in 0..hd {
            grads[w2_off + action.0 * hd + j] = err * h[j];
        }
        grads[b2_off + action.0] = err;
        // Hidden layer through the rectifier.
        for j in 0..hd {
            if pre[j] <= 0.0 {
                continue;
            }
            let dpre = err * w2[action.0 * hd + j];
            for (k, &v) in x.iter().enumerate() {
                grads[j * i + k] = dpre * v;
            }
            grads[hd * i + j] = dpre;
        }
        (q, grads)
    }
}
