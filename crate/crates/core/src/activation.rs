//! Activation functions for coordinate networks.
//!
//! Every periodic activation is applied as `act(freq · z)` to the layer's
//! pre-activation `z`. The hyperbolic oscillation `tanh(sharp · sin x)`
//! interpolates between a sine-like wave (small `sharp`) and the square wave
//! `sign(sin x)` (large `sharp`), and is differentiable in `sharp` as well.

use std::fmt;

use wide::f64x4;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Activation {
    Relu,
    Sine {
        freq: f64,
    },
    /// `tanh(sharp · sin(freq · z))`. With `trainable` set the sharpness is
    /// optimized along with the weights.
    Hosc {
        sharp: f64,
        freq: f64,
        trainable: bool,
    },
    /// `sign(sin z)`. Evaluation only; it has no usable derivative.
    SquareWave,
}

impl Activation {
    pub fn hosc(sharp: f64) -> Self {
        Activation::Hosc {
            sharp,
            freq: 1.0,
            trainable: false,
        }
    }

    pub fn sine(freq: f64) -> Self {
        Activation::Sine { freq }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Activation::Relu | Activation::SquareWave => Ok(()),
            Activation::Sine { freq } => check_freq(freq),
            Activation::Hosc { sharp, freq, .. } => {
                check_freq(freq)?;
                check_sharp(sharp)
            }
        }
    }

    /// The multiplier applied to the pre-activation; 1 for non-periodic kinds.
    pub fn frequency(&self) -> f64 {
        match *self {
            Activation::Sine { freq } | Activation::Hosc { freq, .. } => freq,
            Activation::Relu | Activation::SquareWave => 1.0,
        }
    }

    pub fn sharpness(&self) -> Option<f64> {
        match *self {
            Activation::Hosc { sharp, .. } => Some(sharp),
            _ => None,
        }
    }

    pub fn is_trainable(&self) -> bool {
        matches!(self, Activation::Hosc { trainable: true, .. })
    }

    /// Same activation with a different frequency. No-op for kinds without one.
    pub fn with_frequency(self, freq: f64) -> Self {
        match self {
            Activation::Sine { .. } => Activation::Sine { freq },
            Activation::Hosc {
                sharp, trainable, ..
            } => Activation::Hosc {
                sharp,
                freq,
                trainable,
            },
            other => other,
        }
    }

    /// Same activation with a different sharpness. No-op for non-HOSC kinds.
    pub fn with_sharpness(self, sharp: f64) -> Self {
        match self {
            Activation::Hosc {
                freq, trainable, ..
            } => Activation::Hosc {
                sharp,
                freq,
                trainable,
            },
            other => other,
        }
    }

    pub fn with_trainable(self, trainable: bool) -> Self {
        match self {
            Activation::Hosc { sharp, freq, .. } => Activation::Hosc {
                sharp,
                freq,
                trainable,
            },
            other => other,
        }
    }

    /// Value at pre-activation `z`.
    pub fn forward(&self, z: f64) -> f64 {
        match *self {
            Activation::Relu => relu_forward(z),
            Activation::Sine { freq } => (freq * z).sin(),
            Activation::Hosc { sharp, freq, .. } => hosc(freq * z, sharp),
            Activation::SquareWave => square_wave(z),
        }
    }

    /// Derivative with respect to the pre-activation `z`.
    pub fn derivative(&self, z: f64) -> Result<f64> {
        match *self {
            Activation::Relu => Ok(relu_dx(z)),
            Activation::Sine { freq } => Ok(freq * (freq * z).cos()),
            Activation::Hosc { sharp, freq, .. } => Ok(freq * hosc_dx_unchecked(freq * z, sharp)),
            Activation::SquareWave => Err(Error::Contract(
                "the square wave is evaluation-only and has no derivative".into(),
            )),
        }
    }

    /// Applies the activation to `pre`, writing values to `post` and
    /// `d post / d pre` to `slope`. For HOSC, `sharp_slope` (when given)
    /// receives `d post / d sharp`.
    pub(crate) fn apply_slice(
        &self,
        pre: &[f64],
        post: &mut [f64],
        slope: &mut [f64],
        sharp_slope: Option<&mut [f64]>,
    ) -> Result<()> {
        debug_assert!(pre.len() == post.len() && pre.len() == slope.len());
        match *self {
            Activation::Relu => {
                for ((z, p), d) in pre.iter().zip(post.iter_mut()).zip(slope.iter_mut()) {
                    let on = *z > 0.0;
                    *p = if on { *z } else { 0.0 };
                    *d = if on { 1.0 } else { 0.0 };
                }
            }
            Activation::Sine { freq } => {
                let w = f64x4::from(freq);
                lanes(pre, |z| {
                    let (s, c) = (w * z).sin_cos();
                    [s, w * c, f64x4::ZERO]
                }, [Some(post), Some(slope), None]);
            }
            Activation::Hosc { sharp, freq, .. } => {
                let w = f64x4::from(freq);
                let k = f64x4::from(sharp);
                let wk = f64x4::from(freq * sharp);
                lanes(pre, |z| {
                    let (s, c) = (w * z).sin_cos();
                    let (h, sech2) = tanh_sech2(k * s);
                    [h, wk * c * sech2, s * sech2]
                }, [Some(post), Some(slope), sharp_slope]);
            }
            Activation::SquareWave => return self.derivative(0.0).map(|_| ()),
        }
        Ok(())
    }

    /// Values only; bitwise identical to the `post` output of [`Self::apply_slice`].
    pub(crate) fn apply_values(&self, pre: &[f64], post: &mut [f64]) {
        match *self {
            Activation::Relu => {
                for (z, p) in pre.iter().zip(post.iter_mut()) {
                    *p = if *z > 0.0 { *z } else { 0.0 };
                }
            }
            Activation::Sine { freq } => {
                let w = f64x4::from(freq);
                lanes(pre, |z| [(w * z).sin_cos().0, f64x4::ZERO, f64x4::ZERO], [Some(post), None, None]);
            }
            Activation::Hosc { sharp, freq, .. } => {
                let w = f64x4::from(freq);
                let k = f64x4::from(sharp);
                lanes(pre, |z| [tanh_sech2(k * (w * z).sin_cos().0).0, f64x4::ZERO, f64x4::ZERO], [Some(post), None, None]);
            }
            Activation::SquareWave => {
                for (z, p) in pre.iter().zip(post.iter_mut()) {
                    *p = square_wave(*z);
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sine { .. } => "sine",
            Activation::Hosc { trainable: false, .. } => "hosc",
            Activation::Hosc { trainable: true, .. } => "adahosc",
            Activation::SquareWave => "square",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Activation::Relu | Activation::SquareWave => f.write_str(self.name()),
            Activation::Sine { freq } => write!(f, "sine(freq={freq})"),
            Activation::Hosc { sharp, freq, .. } => {
                write!(f, "{}(sharp={sharp}, freq={freq})", self.name())
            }
        }
    }
}

/// `(tanh y, 1 − tanh² y)` from a single `exp(−2|y|)`.
#[inline(always)]
fn tanh_sech2(y: f64x4) -> (f64x4, f64x4) {
    let e = (f64x4::from(-2.0) * y.abs()).exp();
    let one = f64x4::ONE;
    let inv = one / (one + e);
    let t = (one - e) * inv;
    let t = t.copysign(y);
    (t, f64x4::from(4.0) * e * inv * inv)
}

/// Runs `f` over `input` four lanes at a time, scattering the three lane
/// results into the given outputs. The tail is padded so every element goes
/// through the same SIMD code regardless of its position.
#[inline(always)]
fn lanes<F>(input: &[f64], f: F, mut outs: [Option<&mut [f64]>; 3])
where
    F: Fn(f64x4) -> [f64x4; 3],
{
    let n = input.len();
    let mut i = 0;
    while i < n {
        let m = (n - i).min(4);
        let mut buf = [0.0; 4];
        buf[..m].copy_from_slice(&input[i..i + m]);
        let res = f(f64x4::from(buf));
        for (out, r) in outs.iter_mut().zip(res) {
            if let Some(o) = out {
                o[i..i + m].copy_from_slice(&r.to_array()[..m]);
            }
        }
        i += 4;
    }
}

fn check_sharp(sharp: f64) -> Result<()> {
    if sharp > 0.0 && sharp.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("sharpness must be positive and finite, got {sharp}")))
    }
}

fn check_freq(freq: f64) -> Result<()> {
    if freq > 0.0 && freq.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("frequency must be positive and finite, got {freq}")))
    }
}

fn check_input(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("input must be finite, got {x}")))
    }
}

#[inline]
pub(crate) fn hosc(x: f64, sharp: f64) -> f64 {
    (sharp * x.sin()).tanh()
}

#[inline]
fn hosc_dx_unchecked(x: f64, sharp: f64) -> f64 {
    let h = hosc(x, sharp);
    sharp * x.cos() * (1.0 - h * h)
}

#[inline]
pub(crate) fn hosc_dsharp_unchecked(x: f64, sharp: f64) -> f64 {
    let h = hosc(x, sharp);
    x.sin() * (1.0 - h * h)
}

/// `tanh(sharp · sin x)`, always strictly inside (-1, 1).
pub fn hosc_forward(x: f64, sharp: f64) -> Result<f64> {
    check_input(x)?;
    check_sharp(sharp)?;
    Ok(hosc(x, sharp))
}

/// `d/dx tanh(sharp · sin x) = sharp · cos x · (1 − hosc²)`.
pub fn hosc_dx(x: f64, sharp: f64) -> Result<f64> {
    check_input(x)?;
    check_sharp(sharp)?;
    Ok(hosc_dx_unchecked(x, sharp))
}

/// `d/dsharp tanh(sharp · sin x) = sin x · (1 − hosc²)`.
pub fn hosc_dsharp(x: f64, sharp: f64) -> Result<f64> {
    check_input(x)?;
    check_sharp(sharp)?;
    Ok(hosc_dsharp_unchecked(x, sharp))
}

pub fn sine_forward(x: f64, freq: f64) -> Result<f64> {
    check_freq(freq)?;
    Ok((freq * x).sin())
}

pub fn sine_dx(x: f64, freq: f64) -> Result<f64> {
    check_freq(freq)?;
    Ok(freq * (freq * x).cos())
}

#[inline]
pub fn relu_forward(x: f64) -> f64 {
    x.max(0.0)
}

/// 1 for positive inputs, 0 otherwise (the subgradient at 0 is taken as 0).
#[inline]
pub fn relu_dx(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `sign(sin x)`. Arguments within rounding of a multiple of π map to 0.
pub fn square_wave(x: f64) -> f64 {
    let s = x.sin();
    if s.abs() <= f64::EPSILON * x.abs().max(1.0) {
        0.0
    } else {
        s.signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn hosc_forward_examples() {
        assert_eq!(hosc_forward(0.0, 3.7).unwrap(), 0.0);
        // tanh(1), tanh(8) from a 30-digit evaluation
        assert!((hosc_forward(FRAC_PI_2, 1.0).unwrap() - 0.761_594_155_955_764_9).abs() < 1e-15);
        assert!((hosc_forward(FRAC_PI_2, 8.0).unwrap() - 0.999_999_774_929_675_9).abs() < 1e-15);
    }

    #[test]
    fn hosc_dx_examples() {
        for sharp in [0.5, 1.0, 8.0] {
            assert!(hosc_dx(FRAC_PI_2, sharp).unwrap().abs() < 1e-15);
            assert_eq!(hosc_dx(0.0, sharp).unwrap(), sharp);
        }
        let fd = central(|x| hosc(x, 2.0), 1.0, 1e-5);
        assert!((hosc_dx(1.0, 2.0).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn hosc_dsharp_examples() {
        assert_eq!(hosc_dsharp(0.0, 5.0).unwrap(), 0.0);
        assert!((hosc_dsharp(FRAC_PI_2, 1.0).unwrap() - 0.419_974_341_614_026_07).abs() < 1e-15);
        let fd = central(|s| hosc(1.0, s), 3.0, 1e-5);
        assert!((hosc_dsharp(1.0, 3.0).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn nonpositive_parameters_are_rejected() {
        assert!(hosc_forward(1.0, 0.0).is_err());
        assert!(hosc_dx(1.0, -1.0).is_err());
        assert!(hosc_dsharp(1.0, 0.0).is_err());
        assert!(hosc_forward(f64::NAN, 1.0).is_err());
        assert!(sine_forward(1.0, 0.0).is_err());
        assert!(sine_dx(1.0, -30.0).is_err());
        assert!(Activation::hosc(-2.0).validate().is_err());
        assert!(Activation::sine(0.0).validate().is_err());
    }

    #[test]
    fn sine_examples() {
        assert_eq!(sine_forward(0.0, 30.0).unwrap(), 0.0);
        assert_eq!(sine_dx(0.0, 30.0).unwrap(), 30.0);
        assert!((sine_forward(PI / 60.0, 30.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn relu_examples() {
        assert_eq!(relu_forward(-3.0), 0.0);
        assert_eq!(relu_forward(5.0), 5.0);
        assert_eq!(relu_dx(0.0), 0.0);
        assert_eq!(relu_dx(2.0), 1.0);
    }

    #[test]
    fn square_wave_examples() {
        assert_eq!(square_wave(FRAC_PI_2), 1.0);
        assert_eq!(square_wave(3.0 * FRAC_PI_2), -1.0);
        assert_eq!(square_wave(PI), 0.0);
        assert_eq!(square_wave(0.0), 0.0);
        assert!(Activation::SquareWave.derivative(0.3).is_err());
    }

    #[test]
    fn layer_slice_matches_scalar_definitions() {
        let zs: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.173).collect();
        let acts = [
            Activation::Relu,
            Activation::sine(30.0),
            Activation::Hosc { sharp: 4.0, freq: 30.0, trainable: true },
        ];
        for act in acts {
            let mut post = vec![0.0; zs.len()];
            let mut slope = vec![0.0; zs.len()];
            let mut dsharp = vec![0.0; zs.len()];
            let mut values = vec![0.0; zs.len()];
            act.apply_slice(&zs, &mut post, &mut slope, Some(&mut dsharp)).unwrap();
            act.apply_values(&zs, &mut values);
            assert_eq!(values, post);
            for (i, &z) in zs.iter().enumerate() {
                assert!((post[i] - act.forward(z)).abs() < 1e-15);
                assert!((slope[i] - act.derivative(z).unwrap()).abs() < 1e-12);
                if let Some(sharp) = act.sharpness() {
                    let expect = hosc_dsharp(act.frequency() * z, sharp).unwrap();
                    assert!((dsharp[i] - expect).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences_on_grid() {
        for sharp in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            for i in 0..=200 {
                let x = -PI + 2.0 * PI * i as f64 / 200.0;
                let h = 1e-6;
                let fd_x = central(|t| hosc(t, sharp), x, h);
                let fd_s = central(|s| hosc(x, s), sharp, h * sharp);
                let an_x = hosc_dx(x, sharp).unwrap();
                let an_s = hosc_dsharp(x, sharp).unwrap();
                // relative error with an absolute floor where the derivative vanishes
                assert!((an_x - fd_x).abs() <= 1e-6 * an_x.abs().max(1e-3), "dx x={x} s={sharp}");
                assert!((an_s - fd_s).abs() <= 1e-6 * an_s.abs().max(1e-3), "ds x={x} s={sharp}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn periodic(x in -50.0f64..50.0, sharp in 0.1f64..50.0) {
                let a = hosc(x, sharp);
                let b = hosc(x + 2.0 * PI, sharp);
                prop_assert!((a - b).abs() <= 1e-12);
            }

            #[test]
            fn odd(x in -50.0f64..50.0, sharp in 0.1f64..50.0) {
                prop_assert!((hosc(-x, sharp) + hosc(x, sharp)).abs() <= 1e-12);
            }

            // Beyond |sharp · sin x| ≈ 18.7, tanh rounds to exactly ±1 in f64.
            #[test]
            fn bounded(x in -1e6f64..1e6, sharp in 0.01f64..18.0) {
                prop_assert!(hosc(x, sharp).abs() < 1.0);
                prop_assert!(hosc(x, sharp + 100.0).abs() <= 1.0);
            }

            #[test]
            fn square_wave_limit(x in -20.0f64..20.0) {
                prop_assume!(x.sin().abs() >= 0.1);
                prop_assert!((hosc(x, 100.0) - square_wave(x)).abs() <= 1e-8);
            }

            #[test]
            fn sharpening_is_monotone(x in 0.05f64..3.09) {
                let grid = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
                for w in grid.windows(2) {
                    prop_assert!(hosc(x, w[1]) > hosc(x, w[0]));
                }
            }
        }
    }
}
