//! Loss, Adam and learning-rate schedules.

use crate::error::{Error, Result};
use crate::network::{Gradients, Mlp};
use crate::tensor::Matrix;

/// Mean squared error over every element, with its gradient `2 (pred − target) / n`.
pub fn mse_loss(pred: &Matrix, target: &Matrix) -> Result<(f64, Matrix)> {
    if pred.shape() != target.shape() {
        return Err(Error::Dimension {
            op: "mse_loss",
            left: pred.shape(),
            right: target.shape(),
        });
    }
    let n = pred.len().max(1) as f64;
    let diff = pred.sub(target)?;
    let loss = diff.as_slice().iter().map(|d| d * d).sum::<f64>() / n;
    Ok((loss, diff.scale(2.0 / n)))
}

/// Optional parameter penalty added to the data term.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Regularizer {
    #[default]
    None,
    /// `weight · Σ w²` over all weight matrices (biases and sharpness excluded).
    L2 { weight: f64 },
}

impl Regularizer {
    pub fn penalty(&self, mlp: &Mlp) -> f64 {
        match *self {
            Regularizer::None => 0.0,
            Regularizer::L2 { weight } => {
                weight
                    * mlp
                        .weights()
                        .iter()
                        .flat_map(|w| w.as_slice())
                        .map(|v| v * v)
                        .sum::<f64>()
            }
        }
    }

    pub fn add_gradient(&self, mlp: &Mlp, grads: &mut Gradients) {
        if let Regularizer::L2 { weight } = *self {
            for (g, w) in grads.d_weights.iter_mut().zip(mlp.weights()) {
                for (gv, wv) in g.as_mut_slice().iter_mut().zip(w.as_slice()) {
                    *gv += 2.0 * weight * wv;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LrSchedule {
    Constant,
    /// Multiply by `gamma` every `every` epochs.
    StepDecay { gamma: f64, every: usize },
}

impl LrSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LrSchedule::Constant => Ok(()),
            LrSchedule::StepDecay { gamma, every } => {
                if !(gamma > 0.0 && gamma <= 1.0) {
                    return Err(Error::arg(format!("step decay gamma must be in (0, 1], got {gamma}")));
                }
                if every == 0 {
                    return Err(Error::arg("step decay period must be at least one epoch"));
                }
                Ok(())
            }
        }
    }

    pub fn lr_at(&self, base_lr: f64, epoch: usize) -> f64 {
        match *self {
            LrSchedule::Constant => base_lr,
            LrSchedule::StepDecay { gamma, every } => {
                let k = (epoch / every.max(1)).min(i32::MAX as usize) as i32;
                base_lr * gamma.powi(k)
            }
        }
    }
}

pub fn lr_at(schedule: &LrSchedule, base_lr: f64, epoch: usize) -> f64 {
    schedule.lr_at(base_lr, epoch)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam moments for every parameter of one network. Weights, biases and
/// trainable log-sharpness values all share the same update rule and learning rate.
#[derive(Clone, Debug)]
pub struct AdamState {
    config: AdamConfig,
    m: Gradients,
    v: Gradients,
    step: u64,
}

impl AdamState {
    pub fn new(mlp: &Mlp, config: AdamConfig) -> Self {
        AdamState {
            config,
            m: Gradients::zeros_like(mlp),
            v: Gradients::zeros_like(mlp),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn config(&self) -> AdamConfig {
        self.config
    }

    fn check(&self, mlp: &Mlp, grads: &Gradients) -> Result<()> {
        let shapes = |g: &Gradients| {
            g.d_weights
                .iter()
                .chain(&g.d_biases)
                .map(Matrix::shape)
                .collect::<Vec<_>>()
        };
        let params: Vec<_> = mlp.weights().iter().chain(mlp.biases()).map(Matrix::shape).collect();
        if shapes(grads) != params
            || shapes(&self.m) != params
            || grads.d_log_sharp.len() != mlp.log_sharp().len()
            || self.m.d_log_sharp.len() != mlp.log_sharp().len()
        {
            return Err(Error::Contract(
                "optimizer state, gradients and network disagree on parameter shapes".into(),
            ));
        }
        Ok(())
    }

    /// One bias-corrected Adam update with learning rate `lr`.
    pub fn step(&mut self, mlp: &mut Mlp, grads: &Gradients, lr: f64) -> Result<()> {
        self.check(mlp, grads)?;
        self.step += 1;
        let cfg = self.config;
        let t = self.step.min(i32::MAX as u64) as i32;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);
        let upd = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for i in 0..p.len() {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + cfg.eps);
            }
        };
        let depth = mlp.weights().len();
        for l in 0..depth {
            upd(
                mlp.weights_mut()[l].as_mut_slice(),
                grads.d_weights[l].as_slice(),
                self.m.d_weights[l].as_mut_slice(),
                self.v.d_weights[l].as_mut_slice(),
            );
            upd(
                mlp.biases_mut()[l].as_mut_slice(),
                grads.d_biases[l].as_slice(),
                self.m.d_biases[l].as_mut_slice(),
                self.v.d_biases[l].as_mut_slice(),
            );
        }
        for l in 0..mlp.hidden_layers() {
            if mlp.spec().activations[l].is_trainable() {
                upd(
                    &mut mlp.log_sharp_mut()[l..=l],
                    &grads.d_log_sharp[l..=l],
                    &mut self.m.d_log_sharp[l..=l],
                    &mut self.v.d_log_sharp[l..=l],
                );
            }
        }
        Ok(())
    }
}

pub fn adam_step(mlp: &mut Mlp, grads: &Gradients, state: &mut AdamState, lr: f64) -> Result<()> {
    state.step(mlp, grads, lr)
}
