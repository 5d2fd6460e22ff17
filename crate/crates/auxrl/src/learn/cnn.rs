use crate::rng::RngStream;
use crate::state::Action;

/// Two-layer convolutional action-value network for square channel-major
/// map inputs: conv (k1, valid, stride 1) → relu → conv (k2) → relu →
/// flatten → linear head. Channel counts, kernel sizes and the input side
/// are all configurable so correctness tests can run on small shapes.
///
/// Parameters are one flat vector in the order conv1 weights
/// [c1 × in × k1 × k1], conv1 bias, conv2 weights [c2 × c1 × k2 × k2],
/// conv2 bias, head weights [actions × flat], head bias.
#[derive(Clone, Debug)]
pub struct CnnQ {
    pub in_channels: usize,
    pub side: usize,
    pub c1: usize,
    pub k1: usize,
    pub c2: usize,
    pub k2: usize,
    pub output_dim: usize,
    pub params: Vec<f64>,
}

impl CnnQ {
    pub fn side1(&self) -> usize {
        self.side - self.k1 + 1
    }

    pub fn side2(&self) -> usize {
        self.side1() - self.k2 + 1
    }

    fn flat2(&self) -> usize {
        self.c2 * self.side2() * self.side2()
    }

    fn offsets(&self) -> (usize, usize, usize, usize, usize) {
        let w1 = self.c1 * self.in_channels * self.k1 * self.k1;
        let b1 = w1 + self.c1;
        let w2 = b1 + self.c2 * self.c1 * self.k2 * self.k2;
        let b2 = w2 + self.c2;
        let wh = b2 + self.output_dim * self.flat2();
        (w1, b1, w2, b2, wh)
    }

    pub fn param_count(&self) -> usize {
        let (_, _, _, _, wh) = self.offsets();
        wh + self.output_dim
    }

    /// Weights uniform in ±1/√fan-in (kernel receptive field for the convs,
    /// flattened width for the head), biases zero.
    pub fn new(
        in_channels: usize,
        side: usize,
        c1: usize,
        k1: usize,
        c2: usize,
        k2: usize,
        output_dim: usize,
        rng: &mut RngStream,
    ) -> Self {
        assert!(side >= k1 && side - k1 + 1 >= k2, "kernels exceed the input");
        let mut net = CnnQ {
            in_channels,
            side,
            c1,
            k1,
            c2,
            k2,
            output_dim,
            params: Vec::new(),
        };
        net.params = vec![0.0; net.param_count()];
        let (w1_end, b1_end, w2_end, b2_end, wh_end) = net.offsets();
        let s1 = 1.0 / ((in_channels * k1 * k1) as f64).sqrt();
        for p in &mut net.params[..w1_end] {
            *p = rng.uniform(-s1, s1);
        }
        let s2 = 1.0 / ((c1 * k2 * k2) as f64).sqrt();
        for p in &mut net.params[b1_end..w2_end] {
            *p = rng.uniform(-s2, s2);
        }
        let sh = 1.0 / (net.flat2() as f64).sqrt();
        for p in &mut net.params[b2_end..wh_end] {
            *p = rng.uniform(-sh, sh);
        }
        net
    }

    fn conv(
        input: &[f64],
        in_ch: usize,
        in_side: usize,
        weights: &[f64],
        bias: &[f64],
        out_ch: usize,
        k: usize,
    ) -> Vec<f64> {
        let out_side = in_side - k + 1;
        let mut out = vec![0.0; out_ch * out_side * out_side];
        for o in 0..out_ch {
            for y in 0..out_side {
                for x in 0..out_side {
                    let mut acc = bias[o];
                    for ic in 0..in_ch {
                        for dy in 0..k {
                            let w_row = ((o * in_ch + ic) * k + dy) * k;
                            let i_row = (ic * in_side + y + dy) * in_side + x;
                            for dx in 0..k {
                                acc += weights[w_row + dx] * input[i_row + dx];
                            }
                        }
                    }
                    out[(o * out_side + y) * out_side + x] = acc;
                }
            }
        }
        out
    }

    fn forward_parts(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        assert_eq!(x.len(), self.in_channels * self.side * self.side);
        let (w1_end, b1_end, w2_end, b2_end, wh_end) = self.offsets();
        let pre1 = Self::conv(
            x,
            self.in_channels,
            self.side,
            &self.params[..w1_end],
            &self.params[w1_end..b1_end],
            self.c1,
            self.k1,
        );
        let act1: Vec<f64> = pre1.iter().map(|&v| v.max(0.0)).collect();
        let pre2 = Self::conv(
            &act1,
            self.c1,
            self.side1(),
            &self.params[b1_end..w2_end],
            &self.params[w2_end..b2_end],
            self.c2,
            self.k2,
        );
        let act2: Vec<f64> = pre2.iter().map(|&v| v.max(0.0)).collect();
        let flat = self.flat2();
        let head_w = &self.params[b2_end..wh_end];
        let head_b = &self.params[wh_end..];
        let q: Vec<f64> = (0..self.output_dim)
            .map(|a| {
                head_b[a]
                    + head_w[a * flat..(a + 1) * flat]
                        .iter()
                        .zip(&act2)
                        .map(|(w, v)| w * v)
                        .sum::<f64>()
            })
            .collect();
        (pre1, act1, pre2, act2, q)
    }

    pub fn q_values(&self, x: &[f64]) -> Vec<f64> {
        self.forward_parts(x).4
    }

    /// Semi-gradient loss ½(target − q(x, a))², target constant.
    pub fn forward_backward(&self, x: &[f64], action: Action, target: f64) -> (Vec<f64>, Vec<f64>) {
        let (pre1, act1, pre2, act2, q) = self.forward_parts(x);
        let (w1_end, b1_end, w2_end, b2_end, wh_end) = self.offsets();
        let flat = self.flat2();
        let mut grads = vec![0.0; self.params.len()];
        let err = q[action.0] - target;

        // Head row of the taken action.
        for (j, &v) in act2.iter().enumerate() {
            grads[b2_end + action.0 * flat + j] = err * v;
        }
        grads[wh_end + action.0] = err;

        // Into conv2 activations, through its rectifier.
        let head_w = &self.params[b2_end..wh_end];
        let dpre2: Vec<f64> = (0..flat)
            .map(|j| if pre2[j] > 0.0 { err * head_w[action.0 * flat + j] } else { 0.0 })
            .collect();

        // Conv2 parameter grads and the gradient into act1.
        let (s1, s2, k2) = (self.side1(), self.side2(), self.k2);
        let w2 = &self.params[b1_end..w2_end];
        let mut dact1 = vec![0.0; act1.len()];
        for o in 0..self.c2 {
            for y in 0..s2 {
                for xx in 0..s2 {
                    let d = dpre2[(o * s2 + y) * s2 + xx];
                    if d == 0.0 {
                        continue;
                    }
                    grads[w2_end + o] += d;
                    for ic in 0..self.c1 {
                        for dy in 0..k2 {
                            let w_row = ((o * self.c1 + ic) * k2 + dy) * k2;
                            let a_row = (ic * s1 + y + dy) * s1 + xx;
                            for dx in 0..k2 {
                                grads[b1_end + w_row + dx] += d * act1[a_row + dx];
                                dact1[a_row + dx] += w2[w_row + dx] * d;
                            }
                        }
                    }
                }
            }
        }

        // Through conv1's rectifier into its parameters.
        let k1 = self.k1;
        for o in 0..self.c1 {
            for y in 0..s1 {
                for xx in 0..s1 {
                    let idx = (o * s1 + y) * s1 + xx;
                    if pre1[idx] <= 0.0 {
                        continue;
                    }
                    let d = dact1[idx];
                    if d == 0.0 {
                        continue;
                    }
                    grads[w1_end + o] += d;
                    for ic in 0..self.in_channels {
                        for dy in 0..k1 {
                            let w_row = ((o * self.in_channels + ic) * k1 + dy) * k1;
                            let x_row = (ic * self.side + y + dy) * self.side + xx;
                            for dx in 0..k1 {
                                grads[w_row + dx] += d * x[x_row + dx];
                            }
                        }
                    }
                }
            }
        }
        (q, grads)
    }
}

/// Average-pool each channel of a channel-major square map over
/// non-overlapping `pool × pool` tiles. `side` must be divisible by `pool`.
pub fn avg_pool_channels(map: &[f64], channels: usize, side: usize, pool: usize) -> Vec<f64> {
    assert_eq!(map.len(), channels * side * side);
    assert_eq!(side % pool, 0, "pool must tile the map evenly");
    let out_side = side / pool;
    let mut out = vec![0.0; channels * out_side * out_side];
    let norm = 1.0 / (pool * pool) as f64;
    for c in 0..channels {
        for y in 0..out_side {
            for x in 0..out_side {
                let mut acc = 0.0;
                for dy in 0..pool {
                    for dx in 0..pool {
                        acc += map[(c * side + y * pool + dy) * side + x * pool + dx];
                    }
                }
                out[(c * out_side + y) * out_side + x] = acc * norm;
            }
        }
    }
    out
}
