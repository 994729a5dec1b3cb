//! Coordinate MLPs: `in_dim → width → … → width → out_dim`, one activation per
//! hidden layer, and a linear output layer.
//!
//! Weights are stored `(fan_in, fan_out)` so a batch (rows) maps through a
//! layer as `x · W + b`. HOSC sharpness lives in log space on the [`Mlp`], so
//! gradient steps on trainable sharpness can never make it non-positive.

mod checkpoint;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::rng::{streams, Rng};
use crate::tensor::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitScheme {
    /// First layer `U(±1/fan_in)`, later layers `U(±√(6/fan_in)/ω)` where `ω`
    /// is the layer's activation frequency (1 for the linear output).
    SirenUniform,
    /// `U(±√(1/fan_in))` everywhere.
    StandardUniform,
}

impl InitScheme {
    pub fn name(&self) -> &'static str {
        match self {
            InitScheme::SirenUniform => "siren",
            InitScheme::StandardUniform => "standard",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub hidden_width: usize,
    /// One entry per hidden layer; its length is the hidden depth.
    pub activations: Vec<Activation>,
    pub init: InitScheme,
    pub seed: u64,
}

impl MlpSpec {
    /// ReLU-only stacks get [`InitScheme::StandardUniform`], everything else
    /// [`InitScheme::SirenUniform`].
    pub fn new(in_dim: usize, out_dim: usize, hidden_width: usize, activations: Vec<Activation>) -> Self {
        let init = if activations.iter().all(|a| matches!(a, Activation::Relu)) {
            InitScheme::StandardUniform
        } else {
            InitScheme::SirenUniform
        };
        MlpSpec {
            in_dim,
            out_dim,
            hidden_width,
            activations,
            init,
            seed: 0,
        }
    }

    pub fn relu(in_dim: usize, out_dim: usize, width: usize, depth: usize) -> Self {
        Self::new(in_dim, out_dim, width, vec![Activation::Relu; depth])
    }

    pub fn siren(in_dim: usize, out_dim: usize, width: usize, depth: usize, freq: f64) -> Self {
        Self::new(in_dim, out_dim, width, vec![Activation::sine(freq); depth])
    }

    /// HOSC layers with per-layer sharpness `sharps`; the first layer uses
    /// frequency `first_freq`, the rest 1.
    pub fn hosc(in_dim: usize, out_dim: usize, width: usize, sharps: &[f64], first_freq: f64, trainable: bool) -> Self {
        let acts = sharps
            .iter()
            .enumerate()
            .map(|(i, &sharp)| Activation::Hosc {
                sharp,
                freq: if i == 0 { first_freq } else { 1.0 },
                trainable,
            })
            .collect();
        Self::new(in_dim, out_dim, width, acts)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_init(mut self, init: InitScheme) -> Self {
        self.init = init;
        self
    }

    pub fn hidden_layers(&self) -> usize {
        self.activations.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.in_dim == 0 || self.out_dim == 0 || self.hidden_width == 0 {
            return Err(Error::arg(format!(
                "dimensions must be positive (in {}, out {}, width {})",
                self.in_dim, self.out_dim, self.hidden_width
            )));
        }
        if self.activations.is_empty() {
            return Err(Error::arg("at least one hidden layer is required"));
        }
        for (i, a) in self.activations.iter().enumerate() {
            a.validate()
                .map_err(|e| Error::arg(format!("hidden layer {i}: {e}")))?;
        }
        Ok(())
    }

    /// `(fan_in, fan_out)` for every affine layer, output layer last.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let depth = self.hidden_layers();
        (0..=depth)
            .map(|l| {
                let fan_in = if l == 0 { self.in_dim } else { self.hidden_width };
                let fan_out = if l == depth { self.out_dim } else { self.hidden_width };
                (fan_in, fan_out)
            })
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layer_dims().iter().map(|(i, o)| i * o + o).sum::<usize>()
            + self.activations.iter().filter(|a| a.is_trainable()).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    spec: MlpSpec,
    weights: Vec<Matrix>,
    biases: Vec<Matrix>,
    // ln(sharpness) per hidden layer; 0 for non-HOSC layers
    log_sharp: Vec<f64>,
}

/// Per-layer intermediates of one forward pass, consumed by [`Mlp::backward`].
#[derive(Clone, Debug, Default)]
pub struct ForwardTrace {
    pub input: Matrix,
    /// Hidden pre-activations `z = x·W + b`.
    pub pre: Vec<Matrix>,
    /// Hidden activations.
    pub post: Vec<Matrix>,
    /// `d post / d pre`, elementwise.
    pub slope: Vec<Matrix>,
    /// `d post / d sharp` for trainable HOSC layers.
    pub sharp_slope: Vec<Option<Matrix>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub d_weights: Vec<Matrix>,
    pub d_biases: Vec<Matrix>,
    /// One entry per hidden layer; nonzero only for trainable HOSC layers.
    pub d_log_sharp: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        Gradients {
            d_weights: mlp.weights.iter().map(|w| Matrix::zeros(w.rows(), w.cols())).collect(),
            d_biases: mlp.biases.iter().map(|b| Matrix::zeros(1, b.cols())).collect(),
            d_log_sharp: vec![0.0; mlp.log_sharp.len()],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.d_weights.iter().chain(&self.d_biases).all(Matrix::is_finite)
            && self.d_log_sharp.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.d_weights
            .iter()
            .chain(&self.d_biases)
            .map(Matrix::max_abs)
            .chain(self.d_log_sharp.iter().map(|v| v.abs()))
            .fold(0.0, f64::max)
    }
}

impl Mlp {
    /// Fresh parameters drawn from the spec's init scheme on the INIT stream of `spec.seed`.
    pub fn init(spec: MlpSpec) -> Result<Mlp> {
        spec.validate()?;
        let mut rng = Rng::with_stream(spec.seed, streams::INIT);
        let dims = spec.layer_dims();
        let depth = spec.hidden_layers();
        let mut weights = Vec::with_capacity(dims.len());
        for (l, &(fan_in, fan_out)) in dims.iter().enumerate() {
            let n = fan_in as f64;
            let bound = match spec.init {
                InitScheme::StandardUniform => (1.0 / n).sqrt(),
                InitScheme::SirenUniform if l == 0 => 1.0 / n,
                InitScheme::SirenUniform => {
                    let omega = if l < depth { spec.activations[l].frequency() } else { 1.0 };
                    (6.0 / n).sqrt() / omega
                }
            };
            weights.push(rng.uniform_matrix(-bound, bound, fan_in, fan_out)?);
        }
        let biases = dims.iter().map(|&(_, o)| Matrix::zeros(1, o)).collect();
        let log_sharp = spec
            .activations
            .iter()
            .map(|a| a.sharpness().map_or(0.0, f64::ln))
            .collect();
        Ok(Mlp {
            spec,
            weights,
            biases,
            log_sharp,
        })
    }

    /// Assembles a network from explicit parameters, checking every shape.
    pub fn from_parts(spec: MlpSpec, weights: Vec<Matrix>, biases: Vec<Matrix>, log_sharp: Vec<f64>) -> Result<Mlp> {
        spec.validate()?;
        let mlp = Mlp {
            spec,
            weights,
            biases,
            log_sharp,
        };
        mlp.check_parameters()?;
        Ok(mlp)
    }

    pub fn check_parameters(&self) -> Result<()> {
        let dims = self.spec.layer_dims();
        if self.weights.len() != dims.len() || self.biases.len() != dims.len() {
            return Err(Error::Contract(format!(
                "expected {} layers of parameters, got {} weights and {} biases",
                dims.len(),
                self.weights.len(),
                self.biases.len()
            )));
        }
        for (l, &(fan_in, fan_out)) in dims.iter().enumerate() {
            if self.weights[l].shape() != (fan_in, fan_out) {
                return Err(Error::Dimension {
                    op: "layer weights",
                    left: self.weights[l].shape(),
                    right: (fan_in, fan_out),
                });
            }
            if self.biases[l].shape() != (1, fan_out) {
                return Err(Error::Dimension {
                    op: "layer bias",
                    left: self.biases[l].shape(),
                    right: (1, fan_out),
                });
            }
        }
        if self.log_sharp.len() != self.spec.hidden_layers() {
            return Err(Error::Contract(format!(
                "expected {} sharpness entries, got {}",
                self.spec.hidden_layers(),
                self.log_sharp.len()
            )));
        }
        if let Some(v) = self.log_sharp.iter().find(|v| !v.exp().is_finite() || v.exp() <= 0.0) {
            return Err(Error::Numeric(format!("log-sharpness {v} gives no positive finite sharpness")));
        }
        Ok(())
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[Matrix] {
        &self.weights
    }

    pub fn biases(&self) -> &[Matrix] {
        &self.biases
    }

    pub fn log_sharp(&self) -> &[f64] {
        &self.log_sharp
    }

    pub fn weights_mut(&mut self) -> &mut [Matrix] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Matrix] {
        &mut self.biases
    }

    pub fn log_sharp_mut(&mut self) -> &mut [f64] {
        &mut self.log_sharp
    }

    pub fn hidden_layers(&self) -> usize {
        self.spec.hidden_layers()
    }

    /// Current sharpness of hidden layer `l`, `None` if it is not a HOSC layer.
    pub fn sharpness(&self, l: usize) -> Option<f64> {
        self.spec.activations[l]
            .sharpness()
            .map(|_| self.log_sharp[l].exp())
    }

    /// Current sharpness of every HOSC layer, in layer order.
    pub fn sharpness_values(&self) -> Vec<f64> {
        (0..self.hidden_layers()).filter_map(|l| self.sharpness(l)).collect()
    }

    pub fn set_sharpness(&mut self, l: usize, sharp: f64) -> Result<()> {
        if self.sharpness(l).is_none() {
            return Err(Error::arg(format!("hidden layer {l} is not a HOSC layer")));
        }
        if !(sharp > 0.0 && sharp.is_finite()) {
            return Err(Error::arg(format!("sharpness must be positive, got {sharp}")));
        }
        self.log_sharp[l] = sharp.ln();
        Ok(())
    }

    /// Activation of hidden layer `l` with its current sharpness.
    pub fn layer_activation(&self, l: usize) -> Activation {
        let act = self.spec.activations[l];
        match self.sharpness(l) {
            Some(s) => act.with_sharpness(s),
            None => act,
        }
    }

    fn check_input(&self, coords: &Matrix) -> Result<()> {
        if coords.cols() != self.spec.in_dim {
            return Err(Error::Dimension {
                op: "forward input",
                left: coords.shape(),
                right: (coords.rows(), self.spec.in_dim),
            });
        }
        Ok(())
    }

    fn affine(&self, l: usize, x: &Matrix) -> Result<Matrix> {
        let mut z = Matrix::zeros(0, 0);
        self.affine_into(l, x, &mut z)?;
        Ok(z)
    }

    fn affine_into(&self, l: usize, x: &Matrix, z: &mut Matrix) -> Result<()> {
        x.affine_into(&self.weights[l], &self.biases[l], z)?;
        if !z.is_finite() {
            return Err(Error::Numeric(format!("layer {l} produced a non-finite pre-activation")));
        }
        Ok(())
    }

    /// Batched forward pass caching everything the backward pass needs.
    pub fn forward(&self, coords: &Matrix) -> Result<(Matrix, ForwardTrace)> {
        let mut trace = ForwardTrace::default();
        let out = self.forward_into(coords, &mut trace)?;
        Ok((out, trace))
    }

    /// [`Mlp::forward`] reusing the buffers of an earlier trace.
    pub fn forward_into(&self, coords: &Matrix, trace: &mut ForwardTrace) -> Result<Matrix> {
        self.check_input(coords)?;
        let depth = self.hidden_layers();
        trace.input.copy_from(coords);
        trace.pre.resize_with(depth, || Matrix::zeros(0, 0));
        trace.post.resize_with(depth, || Matrix::zeros(0, 0));
        trace.slope.resize_with(depth, || Matrix::zeros(0, 0));
        trace.sharp_slope.resize_with(depth, || None);
        for l in 0..depth {
            let input = if l == 0 { coords } else { &trace.post[l - 1] };
            let mut z = std::mem::replace(&mut trace.pre[l], Matrix::zeros(0, 0));
            self.affine_into(l, input, &mut z)?;
            let (rows, cols) = z.shape();
            let act = self.layer_activation(l);
            let h = &mut trace.post[l];
            h.reshape_scratch(rows, cols);
            trace.slope[l].reshape_scratch(rows, cols);
            let ds = &mut trace.sharp_slope[l];
            if act.is_trainable() {
                ds.get_or_insert_with(|| Matrix::zeros(0, 0)).reshape_scratch(rows, cols);
            } else {
                *ds = None;
            }
            act.apply_slice(
                z.as_slice(),
                h.as_mut_slice(),
                trace.slope[l].as_mut_slice(),
                ds.as_mut().map(Matrix::as_mut_slice),
            )?;
            trace.pre[l] = z;
        }
        let mut out = Matrix::zeros(0, 0);
        self.affine_into(depth, &trace.post[depth - 1], &mut out)?;
        Ok(out)
    }

    /// Forward pass without a trace.
    pub fn predict(&self, coords: &Matrix) -> Result<Matrix> {
        self.check_input(coords)?;
        let depth = self.hidden_layers();
        let mut h: Option<Matrix> = None;
        for l in 0..depth {
            let z = self.affine(l, h.as_ref().unwrap_or(coords))?;
            let mut out = Matrix::zeros(z.rows(), z.cols());
            self.layer_activation(l).apply_values(z.as_slice(), out.as_mut_slice());
            h = Some(out);
        }
        self.affine(depth, h.as_ref().unwrap_or(coords))
    }

    /// Reverse-mode gradients of a scalar loss given `d loss / d output`.
    pub fn backward(&self, trace: &ForwardTrace, d_output: &Matrix) -> Result<Gradients> {
        let depth = self.hidden_layers();
        let batch = trace.input.rows();
        self.check_trace(trace)?;
        if d_output.shape() != (batch, self.spec.out_dim) {
            return Err(Error::Dimension {
                op: "backward output gradient",
                left: d_output.shape(),
                right: (batch, self.spec.out_dim),
            });
        }

        let mut d_weights = vec![Matrix::zeros(0, 0); depth + 1];
        let mut d_biases = vec![Matrix::zeros(0, 0); depth + 1];
        let mut d_log_sharp = vec![0.0; depth];

        d_weights[depth] = trace.post[depth - 1].t_matmul(d_output)?;
        d_biases[depth] = d_output.sum_rows();
        let mut delta = d_output.matmul_t(&self.weights[depth])?;

        for l in (0..depth).rev() {
            if self.spec.activations[l].is_trainable() {
                let ds = trace.sharp_slope[l].as_ref().ok_or_else(|| {
                    Error::Contract(format!("trace lacks the sharpness slope of layer {l}"))
                })?;
                let g: f64 = delta.as_slice().iter().zip(ds.as_slice()).map(|(d, s)| d * s).sum();
                // chain rule through sharp = exp(log_sharp)
                d_log_sharp[l] = self.log_sharp[l].exp() * g;
            }
            for (d, s) in delta.as_mut_slice().iter_mut().zip(trace.slope[l].as_slice()) {
                *d *= s;
            }
            let input = if l == 0 { &trace.input } else { &trace.post[l - 1] };
            d_weights[l] = input.t_matmul(&delta)?;
            d_biases[l] = delta.sum_rows();
            if l > 0 {
                delta = delta.matmul_t(&self.weights[l])?;
            }
        }

        Ok(Gradients {
            d_weights,
            d_biases,
            d_log_sharp,
        })
    }

    fn check_trace(&self, trace: &ForwardTrace) -> Result<()> {
        let depth = self.hidden_layers();
        let batch = trace.input.rows();
        let expect = (batch, self.spec.hidden_width);
        let stale = trace.input.cols() != self.spec.in_dim
            || trace.pre.len() != depth
            || trace.post.len() != depth
            || trace.slope.len() != depth
            || trace.sharp_slope.len() != depth
            || trace
                .pre
                .iter()
                .chain(&trace.post)
                .chain(&trace.slope)
                .any(|m| m.shape() != expect);
        if stale {
            return Err(Error::Contract(
                "forward trace does not match this network (stale or foreign trace)".into(),
            ));
        }
        Ok(())
    }
}
