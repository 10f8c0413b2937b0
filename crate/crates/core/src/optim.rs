//! Gradient-ascent steps on the flattened search-distribution parameters.

use crate::config::{OptimizerKind, TrainConfig};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub enum Optimizer<T> {
    Sgd {
        lr: T,
    },
    Adam {
        lr: T,
        beta1: T,
        beta2: T,
        eps: T,
        m: Vec<T>,
        v: Vec<T>,
        t: i32,
    },
}

impl<T: Scalar> Optimizer<T> {
    pub fn from_config(cfg: &TrainConfig, n_params: usize) -> Self {
        let lr = T::of(cfg.learning_rate);
        match cfg.optimizer {
            OptimizerKind::Sgd => Optimizer::Sgd { lr },
            OptimizerKind::Adam => Optimizer::Adam {
                lr,
                beta1: T::of(cfg.adam_beta1),
                beta2: T::of(cfg.adam_beta2),
                eps: T::of(cfg.adam_eps),
                m: vec![T::zero(); n_params],
                v: vec![T::zero(); n_params],
                t: 0,
            },
        }
    }

    /// `params += step(grad)`; ascent, since `grad` points up the fitness.
    pub fn ascend(&mut self, params: &mut [T], grad: &[T]) {
        debug_assert_eq!(params.len(), grad.len());
        match self {
            Optimizer::Sgd { lr } => {
                for (p, &g) in params.iter_mut().zip(grad) {
                    *p = *p + *lr * g;
                }
            }
            Optimizer::Adam {
                lr,
                beta1,
                beta2,
                eps,
                m,
                v,
                t,
            } => {
                *t += 1;
                let one = T::one();
                let bc1 = one - beta1.powi(*t);
                let bc2 = one - beta2.powi(*t);
                for i in 0..params.len() {
                    let g = grad[i];
                    m[i] = *beta1 * m[i] + (one - *beta1) * g;
                    v[i] = *beta2 * v[i] + (one - *beta2) * g * g;
                    let m_hat = m[i] / bc1;
                    let v_hat = v[i] / bc2;
                    params[i] = params[i] + *lr * m_hat / (v_hat.sqrt() + *eps);
                }
            }
        }
    }
}
