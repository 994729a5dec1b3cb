//! Training signals: coordinate grids over images, synthetic square-patch
//! images, analytic signed distance fields, band-limited 1D signals, and
//! point-sample files.
//!
//! Every generated dataset lives on `[-1, 1]^k`.

mod image;
mod netpbm;
mod points;
mod sdf;
mod signal1d;

pub use image::{gen_square_patches, image_grid, Image, SquarePatches};
pub use netpbm::{decode_pnm, encode_pnm, read_pnm, write_pnm};
pub use points::{load_point_samples, parse_point_samples, save_point_samples};
pub use sdf::{
    sample_sdf3d, sdf_box, sdf_circle, sdf_sphere, sdf_star, sdf_torus, star_grid_dataset, Shape2, Shape3, StarShape,
};
pub use signal1d::{gen_signal1d, signal1d_from_modes, SineMode};

use crate::error::{Error, Result};
use crate::tensor::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalKind {
    Image,
    Sdf2d,
    Sdf3d,
    Signal1d,
}

impl SignalKind {
    pub fn name(&self) -> &'static str {
        match self {
            SignalKind::Image => "image",
            SignalKind::Sdf2d => "sdf2d",
            SignalKind::Sdf3d => "sdf3d",
            SignalKind::Signal1d => "signal1d",
        }
    }
}

/// A set of `(coordinate, target)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalDataset {
    pub coords: Matrix,
    pub targets: Matrix,
    pub domain_lo: Vec<f64>,
    pub domain_hi: Vec<f64>,
    pub kind: SignalKind,
    /// `(width, height)` when the samples form a regular grid in row-major order.
    pub grid: Option<(usize, usize)>,
}

impl SignalDataset {
    /// Dataset on the canonical `[-1, 1]^k` domain.
    pub fn on_unit_domain(coords: Matrix, targets: Matrix, kind: SignalKind) -> Result<Self> {
        let k = coords.cols();
        let ds = SignalDataset {
            coords,
            targets,
            domain_lo: vec![-1.0; k],
            domain_hi: vec![1.0; k],
            kind,
            grid: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Dataset whose domain is the bounding box of its coordinates.
    pub fn with_bounding_box(coords: Matrix, targets: Matrix, kind: SignalKind) -> Result<Self> {
        let k = coords.cols();
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        for r in 0..coords.rows() {
            for (d, &v) in coords.row(r).iter().enumerate() {
                lo[d] = lo[d].min(v);
                hi[d] = hi[d].max(v);
            }
        }
        let ds = SignalDataset {
            coords,
            targets,
            domain_lo: lo,
            domain_hi: hi,
            kind,
            grid: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.coords.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.rows() == 0
    }

    pub fn in_dim(&self) -> usize {
        self.coords.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.targets.cols()
    }

    pub fn validate(&self) -> Result<()> {
        if self.coords.rows() != self.targets.rows() {
            return Err(Error::Dimension {
                op: "dataset coords/targets",
                left: self.coords.shape(),
                right: self.targets.shape(),
            });
        }
        if self.domain_lo.len() != self.in_dim() || self.domain_hi.len() != self.in_dim() {
            return Err(Error::arg("domain bounds must have one entry per coordinate dimension"));
        }
        if !self.coords.is_finite() || !self.targets.is_finite() {
            return Err(Error::Numeric("dataset contains non-finite values".into()));
        }
        for r in 0..self.coords.rows() {
            for (d, &v) in self.coords.row(r).iter().enumerate() {
                if v < self.domain_lo[d] || v > self.domain_hi[d] {
                    return Err(Error::arg(format!(
                        "sample {r} coordinate {d} = {v} lies outside [{}, {}]",
                        self.domain_lo[d], self.domain_hi[d]
                    )));
                }
            }
        }
        if self.kind == SignalKind::Image && self.targets.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::arg("image targets must lie in [0, 1]"));
        }
        if let Some((w, h)) = self.grid {
            if w * h != self.len() {
                return Err(Error::arg(format!("grid {w}x{h} does not match {} samples", self.len())));
            }
        }
        Ok(())
    }
}
