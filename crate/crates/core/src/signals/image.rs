use super::{SignalDataset, SignalKind};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::Matrix;

/// Row-major image with interleaved channels and values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl Image {
    pub fn black(width: usize, height: usize, channels: usize) -> Self {
        Image {
            width,
            height,
            channels,
            data: vec![0.0; width * height * channels],
        }
    }

    pub fn from_data(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * channels {
            return Err(Error::arg(format!(
                "{width}x{height}x{channels} image needs {} values, got {}",
                width * height * channels,
                data.len()
            )));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds an image from a `(width·height) × channels` matrix in grid order,
    /// clamping values into `[0, 1]`.
    pub fn from_matrix(width: usize, height: usize, m: &Matrix) -> Result<Self> {
        if m.rows() != width * height {
            return Err(Error::Dimension {
                op: "image from matrix",
                left: m.shape(),
                right: (width * height, m.cols()),
            });
        }
        let data = m.as_slice().iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Image::from_data(width, height, m.cols(), data)
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(self.width * self.height, self.channels, self.data.clone())
            .expect("image buffer length is width·height·channels")
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: f64) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// Pixel-center coordinates paired with pixel values.
    pub fn to_dataset(&self) -> Result<SignalDataset> {
        let mut ds = SignalDataset::on_unit_domain(
            image_grid(self.width, self.height),
            self.to_matrix(),
            SignalKind::Image,
        )?;
        ds.grid = Some((self.width, self.height));
        Ok(ds)
    }

    /// Averages `factor × factor` blocks; dimensions must be divisible by `factor`.
    pub fn downsample(&self, factor: usize) -> Result<Image> {
        if factor == 0 || self.width % factor != 0 || self.height % factor != 0 {
            return Err(Error::arg(format!(
                "cannot downsample {}x{} by {factor}",
                self.width, self.height
            )));
        }
        let (w, h) = (self.width / factor, self.height / factor);
        let mut out = Image::black(w, h, self.channels);
        let norm = 1.0 / (factor * factor) as f64;
        for y in 0..h {
            for x in 0..w {
                for c in 0..self.channels {
                    let mut s = 0.0;
                    for dy in 0..factor {
                        for dx in 0..factor {
                            s += self.get(x * factor + dx, y * factor + dy, c);
                        }
                    }
                    out.set(x, y, c, s * norm);
                }
            }
        }
        Ok(out)
    }
}

/// Pixel centers of a `width × height` grid mapped onto `[-1, 1]²`, one row per
/// pixel in row-major order, columns `(x, y)`.
pub fn image_grid(width: usize, height: usize) -> Matrix {
    let mut data = Vec::with_capacity(2 * width * height);
    for j in 0..height {
        let y = 2.0 * (j as f64 + 0.5) / height as f64 - 1.0;
        for i in 0..width {
            data.push(2.0 * (i as f64 + 0.5) / width as f64 - 1.0);
            data.push(y);
        }
    }
    Matrix::from_vec(width * height, 2, data).expect("grid buffer length")
}

/// A generated square-patch image together with the top-left corner of every patch.
#[derive(Clone, Debug)]
pub struct SquarePatches {
    pub image: Image,
    pub patch_size: usize,
    pub corners: Vec<(usize, usize)>,
}

/// Black `img_size²` image with `n_patches` white squares of side `patch_size`
/// placed uniformly at random, fully inside the frame. Overlaps are allowed.
pub fn gen_square_patches(rng: &mut Rng, img_size: usize, n_patches: usize, patch_size: usize) -> Result<SquarePatches> {
    if patch_size == 0 || patch_size > img_size {
        return Err(Error::arg(format!(
            "patch size {patch_size} must be in 1..={img_size}"
        )));
    }
    let mut image = Image::black(img_size, img_size, 1);
    let slots = img_size - patch_size + 1;
    let mut corners = Vec::with_capacity(n_patches);
    for _ in 0..n_patches {
        let x0 = rng.below(slots);
        let y0 = rng.below(slots);
        for y in y0..y0 + patch_size {
            for x in x0..x0 + patch_size {
                image.set(x, y, 0, 1.0);
            }
        }
        corners.push((x0, y0));
    }
    Ok(SquarePatches {
        image,
        patch_size,
        corners,
    })
}
