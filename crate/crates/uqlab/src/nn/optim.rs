//! Flat-parameter optimizers for the training loop.

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl OptimizerKind {
    pub fn adam_default() -> OptimizerKind {
        OptimizerKind::Adam { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Adam { .. } => "adam",
        }
    }
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::adam_default()
    }
}

#[derive(Debug)]
pub(crate) struct Optimizer {
    kind: OptimizerKind,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step_count: u64,
}

impl Optimizer {
    pub(crate) fn new(kind: OptimizerKind, param_count: usize) -> Optimizer {
        let state_len = match kind {
            OptimizerKind::Sgd => 0,
            OptimizerKind::Adam { .. } => param_count,
        };
        Optimizer {
            kind,
            first_moment: vec![0.0; state_len],
            second_moment: vec![0.0; state_len],
            step_count: 0,
        }
    }

    pub(crate) fn step(&mut self, params: &mut [f64], grad: &[f64], learning_rate: f64) {
        debug_assert_eq!(params.len(), grad.len());
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grad) {
                    *p -= learning_rate * g;
                }
            }
            OptimizerKind::Adam { beta1, beta2, epsilon } => {
                self.step_count += 1;
                let t = self.step_count as i32;
                let bias1 = 1.0 - beta1.powi(t);
                let bias2 = 1.0 - beta2.powi(t);
                for i in 0..params.len() {
                    let g = grad[i];
                    self.first_moment[i] = beta1 * self.first_moment[i] + (1.0 - beta1) * g;
                    self.second_moment[i] = beta2 * self.second_moment[i] + (1.0 - beta2) * g * g;
                    let m_hat = self.first_moment[i] / bias1;
                    let v_hat = self.second_moment[i] / bias2;
                    params[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
                }
            }
        }
    }
}
