//! First-order optimizers over a [`ParamStore`].

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::params::{Bound, ParamStore};
use super::tape::Grads;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    /// Adam with bias correction; the desk-scale default.
    Adam,
    /// Plain SGD with a fixed rate.
    Sgd,
}

pub struct Optimizer {
    kind: OptimizerKind,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
    step: usize,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, lr: f64, store: &ParamStore) -> Self {
        let moments: Vec<Array2<f64>> = store.iter().map(|(_, p)| Array2::zeros(p.dim())).collect();
        Optimizer {
            kind,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: moments.clone(),
            v: moments,
            step: 0,
        }
    }

    /// Applies one update from the gradients of a backward sweep. Parameters
    /// that received no gradient are left untouched.
    pub fn apply(&mut self, store: &mut ParamStore, bound: &Bound, grads: &Grads) {
        self.step += 1;
        for idx in 0..store.len() {
            let id = super::params::ParamId(idx);
            let Some(grad) = grads.get(bound.var(id)) else {
                continue;
            };
            match self.kind {
                OptimizerKind::Sgd => {
                    let p = store.get_mut(id);
                    *p -= &grad.mapv(|g| g * self.lr);
                }
                OptimizerKind::Adam => {
                    let m = &mut self.m[idx];
                    let v = &mut self.v[idx];
                    *m = m.mapv(|x| x * self.beta1) + grad.mapv(|g| g * (1.0 - self.beta1));
                    *v = v.mapv(|x| x * self.beta2)
                        + grad.mapv(|g| g * g * (1.0 - self.beta2));
                    let bias1 = 1.0 - self.beta1.powi(self.step as i32);
                    let bias2 = 1.0 - self.beta2.powi(self.step as i32);
                    let p = store.get_mut(id);
                    for ((pv, mv), vv) in p.iter_mut().zip(m.iter()).zip(v.iter()) {
                        let mhat = mv / bias1;
                        let vhat = vv / bias2;
                        *pv -= self.lr * mhat / (vhat.sqrt() + self.eps);
                    }
                }
            }
        }
    }
}
