use std::f64::consts::TAU;

use super::{SignalDataset, SignalKind};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::Matrix;

/// One term `amplitude · sin(2π · freq · x + phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SineMode {
    pub amplitude: f64,
    pub freq: f64,
    pub phase: f64,
}

impl SineMode {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * (TAU * self.freq * x + self.phase).sin()
    }
}

/// Random band-limited signal: `a ~ U[-1, 1]`, `f ~ U[1, max_freq]`,
/// `φ ~ U[0, 2π)`, sampled at `n_samples` evenly spaced points of `[-1, 1]`.
pub fn gen_signal1d(rng: &mut Rng, n_modes: usize, max_freq: f64, n_samples: usize) -> Result<(Vec<SineMode>, SignalDataset)> {
    if n_modes == 0 {
        return Err(Error::arg("a random signal needs at least one mode"));
    }
    if !(max_freq >= 1.0) || !max_freq.is_finite() {
        return Err(Error::arg(format!("max_freq must be a finite value ≥ 1, got {max_freq}")));
    }
    let modes: Vec<SineMode> = (0..n_modes)
        .map(|_| SineMode {
            amplitude: rng.next_f64() * 2.0 - 1.0,
            freq: 1.0 + rng.next_f64() * (max_freq - 1.0),
            phase: rng.next_f64() * TAU,
        })
        .collect();
    let ds = signal1d_from_modes(&modes, n_samples)?;
    Ok((modes, ds))
}

/// Samples a fixed sum of modes; the deterministic counterpart of [`gen_signal1d`].
pub fn signal1d_from_modes(modes: &[SineMode], n_samples: usize) -> Result<SignalDataset> {
    if n_samples < 2 {
        return Err(Error::arg("a 1D signal needs at least two samples"));
    }
    let xs: Vec<f64> = (0..n_samples)
        .map(|i| -1.0 + 2.0 * i as f64 / (n_samples - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| modes.iter().map(|m| m.eval(x)).sum()).collect();
    SignalDataset::on_unit_domain(
        Matrix::from_vec(n_samples, 1, xs)?,
        Matrix::from_vec(n_samples, 1, ys)?,
        SignalKind::Signal1d,
    )
}
