use super::LearnError;

/// Numeric width of stored parameters and optimizer moments. `F32` rounds
/// them through f32 after every update; computation stays f64 either way.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    F32,
    F64,
}

/// Round each value to the nearest f32.
pub fn quantize_f32(xs: &mut [f64]) {
    for x in xs {
        *x = *x as f32 as f64;
    }
}

/// Adam with bias-corrected moments.
#[derive(Clone, Debug)]
pub struct AdamState {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(alpha: f64, dim: usize) -> Self {
        AdamState {
            alpha,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }

    pub fn step(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        precision: Precision,
    ) -> Result<(), LearnError> {
        assert_eq!(params.len(), grads.len());
        assert_eq!(params.len(), self.m.len());
        if grads.iter().any(|g| !g.is_finite()) {
            return Err(LearnError::NonFinite { context: "adam gradients" });
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.alpha * m_hat / (v_hat.sqrt() + self.eps);
        }
        if precision == Precision::F32 {
            quantize_f32(params);
            quantize_f32(&mut self.m);
            quantize_f32(&mut self.v);
        }
        Ok(())
    }
}

/// The one update path every learner funnels through.
#[derive(Clone, Debug)]
pub enum Optimizer {
    Sgd { alpha: f64 },
    Adam(AdamState),
}

impl Optimizer {
    pub fn sgd(alpha: f64) -> Self {
        Optimizer::Sgd { alpha }
    }

    pub fn adam(alpha: f64, dim: usize) -> Self {
        Optimizer::Adam(AdamState::new(alpha, dim))
    }

    /// Descend `params` along `grads` (gradients of a loss to minimize).
    pub fn step(
        &mut self,
        params: &mut [f64],
        grads: &[f64],
        precision: Precision,
    ) -> Result<(), LearnError> {
        match self {
            Optimizer::Sgd { alpha } => {
                if grads.iter().any(|g| !g.is_finite()) {
                    return Err(LearnError::NonFinite { context: "sgd gradients" });
                }
                for (p, g) in params.iter_mut().zip(grads) {
                    *p -= *alpha * g;
                }
                if precision == Precision::F32 {
                    quantize_f32(params);
                }
                Ok(())
            }
            Optimizer::Adam(state) => state.step(params, grads, precision),
        }
    }
}
