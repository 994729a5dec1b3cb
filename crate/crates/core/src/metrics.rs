//! PSNR, occupancy IoU, residual maps, grid evaluation and training logs.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::Mlp;
use crate::tensor::Matrix;

/// Reported PSNR for an exact match.
pub const PSNR_CAP: f64 = 200.0;

/// `10·log10(max² / MSE)` in dB, capped at [`PSNR_CAP`].
pub fn psnr(pred: &Matrix, target: &Matrix, max_value: f64) -> Result<f64> {
    if pred.shape() != target.shape() {
        return Err(Error::Dimension {
            op: "psnr",
            left: pred.shape(),
            right: target.shape(),
        });
    }
    if !(max_value > 0.0) {
        return Err(Error::arg(format!("psnr max_value must be positive, got {max_value}")));
    }
    if pred.is_empty() {
        return Err(Error::arg("psnr of an empty signal"));
    }
    let sse: f64 = pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(psnr_from_mse(sse / pred.len() as f64, max_value))
}

pub fn psnr_from_mse(mse: f64, max_value: f64) -> f64 {
    if mse <= 0.0 {
        return PSNR_CAP;
    }
    (10.0 * (max_value * max_value / mse).log10()).min(PSNR_CAP)
}

/// Values of a scalar field at the vertices of a uniform grid over `[-1, 1]^dims`,
/// first axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    pub resolution: usize,
    pub dims: usize,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    /// Coordinate of vertex `i` along any axis.
    pub fn vertex(resolution: usize, i: usize) -> f64 {
        -1.0 + 2.0 * i as f64 / (resolution - 1) as f64
    }

    /// Samples `f` at every vertex.
    pub fn from_fn(resolution: usize, dims: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<ScalarGrid> {
        check_grid(resolution, dims)?;
        let n = resolution.pow(dims as u32);
        let values = (0..n)
            .into_par_iter()
            .map_init(
                || vec![0.0; dims],
                |p, idx| {
                    fill_vertex(resolution, idx, p);
                    f(p)
                },
            )
            .collect();
        Ok(ScalarGrid {
            resolution,
            dims,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_grid(resolution: usize, dims: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::arg(format!("grid resolution must be at least 2, got {resolution}")));
    }
    if !(1..=3).contains(&dims) {
        return Err(Error::arg(format!("grids have 1 to 3 dimensions, got {dims}")));
    }
    Ok(())
}

fn fill_vertex(resolution: usize, mut idx: usize, p: &mut [f64]) {
    for c in p.iter_mut() {
        *c = ScalarGrid::vertex(resolution, idx % resolution);
        idx /= resolution;
    }
}

/// Rows per batched forward pass in [`eval_grid`].
const GRID_CHUNK: usize = 1 << 14;

/// Evaluates a scalar-output network at every grid vertex. Chunks are fixed, so
/// the result does not depend on the number of threads.
pub fn eval_grid(mlp: &Mlp, resolution: usize, dims: usize) -> Result<ScalarGrid> {
    check_grid(resolution, dims)?;
    let spec = mlp.spec();
    if spec.in_dim != dims || spec.out_dim != 1 {
        return Err(Error::Contract(format!(
            "grid evaluation needs a {dims}→1 network, got {}→{}",
            spec.in_dim, spec.out_dim
        )));
    }
    let n = resolution.pow(dims as u32);
    let chunks: Vec<Vec<f64>> = (0..n.div_ceil(GRID_CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * GRID_CHUNK;
            let rows = GRID_CHUNK.min(n - start);
            let mut coords = Matrix::zeros(rows, dims);
            for r in 0..rows {
                fill_vertex(resolution, start + r, &mut coords.as_mut_slice()[r * dims..(r + 1) * dims]);
            }
            mlp.predict(&coords).map(Matrix::into_vec)
        })
        .collect::<Result<_>>()?;
    Ok(ScalarGrid {
        resolution,
        dims,
        values: chunks.concat(),
    })
}

/// Intersection over union of the negative regions of two fields.
/// Two empty shapes count as a perfect match.
pub fn iou_occupancy(a: &ScalarGrid, b: &ScalarGrid) -> Result<f64> {
    if a.resolution != b.resolution || a.dims != b.dims {
        return Err(Error::Dimension {
            op: "iou grids",
            left: (a.resolution, a.dims),
            right: (b.resolution, b.dims),
        });
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for (x, y) in a.values.iter().zip(&b.values) {
        let (ia, ib) = (*x < 0.0, *y < 0.0);
        inter += (ia && ib) as u64;
        union += (ia || ib) as u64;
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

/// `|pred − target|` scaled so the largest residual is 1; all zeros on an exact match.
pub fn residual_image(pred: &Matrix, target: &Matrix) -> Result<Matrix> {
    let diff = pred.sub(target)?.map(f64::abs);
    let max = diff.max_abs();
    Ok(if max > 0.0 { diff.scale(1.0 / max) } else { diff })
}

/// One row of a training log. `epoch` counts completed epochs.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRecord {
    pub epoch: usize,
    pub loss: f64,
    pub psnr: Option<f64>,
    pub lr: f64,
    pub sharpness: Vec<f64>,
}

/// Per-epoch training log, written as CSV with columns
/// `epoch,loss,psnr,lr,sharp_l0,…` (`psnr` left empty when not applicable).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsLog {
    records: Vec<MetricsRecord>,
    /// Sharpness column count; fixed by the first record unless given.
    sharp_layers: Option<usize>,
}

impl MetricsLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// A log whose records carry exactly `layers` sharpness values, so the
    /// CSV header is complete even before the first record.
    pub fn with_sharpness_layers(layers: usize) -> Self {
        MetricsLog { records: Vec::new(), sharp_layers: Some(layers) }
    }

    pub fn push(&mut self, record: MetricsRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.epoch <= last.epoch {
                return Err(Error::Contract(format!(
                    "log epochs must increase: {} after {}",
                    record.epoch, last.epoch
                )));
            }
        }
        let layers = *self.sharp_layers.get_or_insert(record.sharpness.len());
        if record.sharpness.len() != layers {
            return Err(Error::Contract(format!(
                "expected {layers} sharpness values, got {}",
                record.sharpness.len()
            )));
        }
        let finite = record.loss.is_finite()
            && record.lr.is_finite()
            && record.psnr.is_none_or(f64::is_finite)
            && record.sharpness.iter().all(|s| s.is_finite());
        if !finite {
            return Err(Error::Numeric(format!("non-finite metrics at epoch {}", record.epoch)));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[MetricsRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&MetricsRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Highest logged PSNR.
    pub fn max_psnr(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.psnr).reduce(f64::max)
    }

    /// First logged epoch whose PSNR reaches `threshold`.
    pub fn epochs_to_psnr(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.psnr.is_some_and(|p| p >= threshold))
            .map(|r| r.epoch)
    }

    pub fn to_csv(&self) -> String {
        let layers = self.sharp_layers.unwrap_or(0);
        let mut out = String::from("epoch,loss,psnr,lr");
        for l in 0..layers {
            write!(out, ",sharp_l{l}").unwrap();
        }
        out.push('\n');
        for r in &self.records {
            write!(out, "{},{},", r.epoch, r.loss).unwrap();
            if let Some(p) = r.psnr {
                write!(out, "{p}").unwrap();
            }
            write!(out, ",{}", r.lr).unwrap();
            for s in &r.sharpness {
                write!(out, ",{s}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}
