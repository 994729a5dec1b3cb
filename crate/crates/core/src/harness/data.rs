use std::path::Path;

use super::config::{DatasetKind, DatasetSpec, Solid};
use crate::error::{Error, Result};
use crate::rng::{streams, Rng};
use crate::signals::{
    decode_pnm, gen_signal1d, gen_square_patches, load_point_samples, read_pnm, sample_sdf3d, star_grid_dataset, Image,
    Shape2, Shape3, SignalDataset, StarShape,
};

/// Analytic ground truth behind a dataset, when there is one.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    None,
    Image(Image),
    Shape2(Shape2),
    Shape3(Shape3),
}

#[derive(Clone, Debug)]
pub struct PreparedData {
    pub dataset: SignalDataset,
    pub reference: Reference,
}

const CAMERAMAN_256: &[u8] = include_bytes!("../../assets/cameraman_256.pgm");
const CAMERAMAN_128: &[u8] = include_bytes!("../../assets/cameraman_128.pgm");
const ASTRONAUT_512: &[u8] = include_bytes!("../../assets/astronaut_512.ppm");

/// Built-in photos addressable as `builtin:NAME`.
pub const BUILTIN_IMAGES: &[&str] = &["cameraman-256", "cameraman-128", "astronaut-512"];

/// Loads `builtin:NAME` or a PGM/PPM path.
pub fn load_image(source: &str) -> Result<Image> {
    match source.strip_prefix("builtin:") {
        Some("cameraman-256") => decode_pnm(CAMERAMAN_256, source),
        Some("cameraman-128") => decode_pnm(CAMERAMAN_128, source),
        Some("astronaut-512") => decode_pnm(ASTRONAUT_512, source),
        Some(other) => Err(Error::Config(format!(
            "unknown built-in image {other:?}; available: {}",
            BUILTIN_IMAGES.join(", ")
        ))),
        None => read_pnm(Path::new(source)),
    }
}

pub fn solid_shape(solid: Solid) -> Shape3 {
    match solid {
        Solid::SphereMinusBox => Shape3::sphere_minus_box(),
        Solid::Sphere => Shape3::Sphere {
            center: [0.0; 3],
            radius: 0.6,
        },
        Solid::Cube => Shape3::Cuboid {
            center: [0.0; 3],
            half: [0.5; 3],
        },
        Solid::Torus => Shape3::Torus {
            center: [0.0; 3],
            major: 0.5,
            minor: 0.2,
        },
    }
}

/// Builds the training set; generated data draws from the `data_seed` data stream.
pub fn build_dataset(spec: &DatasetSpec, data_seed: u64) -> Result<PreparedData> {
    let mut rng = Rng::with_stream(data_seed, streams::DATA);
    let (dataset, reference) = match spec.kind {
        DatasetKind::Image => {
            let mut img = load_image(&spec.image)?;
            if spec.downsample > 1 {
                img = img.downsample(spec.downsample)?;
            }
            (img.to_dataset()?, Reference::Image(img))
        }
        DatasetKind::Patches => {
            let p = gen_square_patches(&mut rng, spec.patch_image_size, spec.patch_count, spec.patch_size)?;
            (p.image.to_dataset()?, Reference::Image(p.image))
        }
        DatasetKind::Star | DatasetKind::Circle => {
            let shape = if spec.kind == DatasetKind::Star {
                Shape2::Star(StarShape::new(spec.star_points, spec.star_outer, spec.star_inner)?)
            } else {
                if !(spec.circle_radius > 0.0) {
                    return Err(Error::Config("circle_radius must be positive".into()));
                }
                Shape2::Circle {
                    radius: spec.circle_radius,
                }
            };
            (star_grid_dataset(&shape, spec.grid_resolution)?, Reference::Shape2(shape))
        }
        DatasetKind::Sdf3d => {
            let shape = solid_shape(spec.solid);
            let ds = sample_sdf3d(&shape, &mut rng, spec.samples, spec.near_fraction, spec.near_sigma)?;
            (ds, Reference::Shape3(shape))
        }
        DatasetKind::Points => (load_point_samples(Path::new(&spec.points_path))?, Reference::None),
        DatasetKind::Signal1d => {
            let (_, ds) = gen_signal1d(&mut rng, spec.signal_modes, spec.signal_max_freq, spec.signal_samples)?;
            (ds, Reference::None)
        }
    };
    Ok(PreparedData { dataset, reference })
}
