use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::ScalarGrid;
use crate::network::Mlp;
use crate::signals::{image_grid, write_pnm, Image};
use crate::tensor::Matrix;

use super::train::predict_chunked;

/// Evaluates an image network at the pixel centers of a `width × height` grid.
pub fn predict_image(mlp: &Mlp, width: usize, height: usize) -> Result<Image> {
    let spec = mlp.spec();
    if spec.in_dim != 2 || !(spec.out_dim == 1 || spec.out_dim == 3) {
        return Err(Error::Contract(format!(
            "image rendering needs a 2→1 or 2→3 network, got {}→{}",
            spec.in_dim, spec.out_dim
        )));
    }
    let pred = predict_chunked(mlp, &image_grid(width, height))?;
    Image::from_matrix(width, height, &pred)
}

/// Renders an image network to PGM (gray) or PPM (RGB).
pub fn render_image(mlp: &Mlp, width: usize, height: usize, path: &Path) -> Result<()> {
    write_pnm(path, &predict_image(mlp, width, height)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceAxis {
    X,
    Y,
    Z,
}

impl SliceAxis {
    fn index(self) -> usize {
        self as usize
    }
}

/// A plane through the `[-1, 1]³` cube, normal to `axis` at `offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slice {
    pub axis: SliceAxis,
    pub offset: f64,
}

impl Default for Slice {
    fn default() -> Self {
        Slice {
            axis: SliceAxis::Z,
            offset: 0.0,
        }
    }
}

impl std::str::FromStr for Slice {
    type Err = Error;

    /// `axis=z,offset=0`; either part may be omitted.
    fn from_str(s: &str) -> Result<Slice> {
        let mut slice = Slice::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::Argument(format!("invalid slice component {part:?} (expected axis=x|y|z or offset=NUMBER)"));
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            match (k.trim(), v.trim()) {
                ("axis", "x") => slice.axis = SliceAxis::X,
                ("axis", "y") => slice.axis = SliceAxis::Y,
                ("axis", "z") => slice.axis = SliceAxis::Z,
                ("offset", v) => slice.offset = v.parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        if !(-1.0..=1.0).contains(&slice.offset) {
            return Err(Error::Argument(format!("slice offset {} lies outside [-1, 1]", slice.offset)));
        }
        Ok(slice)
    }
}

/// SDF values on a `resolution²` vertex grid. 2D networks ignore the slice and
/// cover their whole plane; 3D networks are cut by it. Rows run along the
/// second free axis.
pub fn sdf_slice_values(mlp: &Mlp, slice: Slice, resolution: usize) -> Result<Matrix> {
    let spec = mlp.spec();
    if spec.out_dim != 1 || !(spec.in_dim == 2 || spec.in_dim == 3) {
        return Err(Error::Contract(format!(
            "SDF slices need a 2→1 or 3→1 network, got {}→{}",
            spec.in_dim, spec.out_dim
        )));
    }
    if resolution < 2 {
        return Err(Error::arg("slice resolution must be at least 2"));
    }
    let dims = spec.in_dim;
    let free: Vec<usize> = if dims == 2 {
        vec![0, 1]
    } else {
        (0..3).filter(|&a| a != slice.axis.index()).collect()
    };
    let mut coords = Matrix::zeros(resolution * resolution, dims);
    for j in 0..resolution {
        for i in 0..resolution {
            let r = j * resolution + i;
            if dims == 3 {
                coords.set(r, slice.axis.index(), slice.offset);
            }
            coords.set(r, free[0], ScalarGrid::vertex(resolution, i));
            coords.set(r, free[1], ScalarGrid::vertex(resolution, j));
        }
    }
    let v = predict_chunked(mlp, &coords)?;
    Matrix::from_vec(resolution, resolution, v.into_vec())
}

/// Diverging gray map: `-scale` black, zero mid-gray, `+scale` white.
pub fn diverging_gray(values: &Matrix, scale: f64) -> Image {
    let data = values
        .as_slice()
        .iter()
        .map(|v| (0.5 + 0.5 * v / scale).clamp(0.0, 1.0))
        .collect();
    Image::from_data(values.cols(), values.rows(), 1, data).expect("one value per pixel")
}

/// Writes an SDF slice as a diverging grayscale PGM.
pub fn render_sdf_slice(mlp: &Mlp, slice: Slice, resolution: usize, path: &Path) -> Result<()> {
    write_pnm(path, &diverging_gray(&sdf_slice_values(mlp, slice, resolution)?, 1.0))
}
