//! The square-patch benchmark: ReLU, SIREN and HOSC (sharpness 2, 4, 8, 16
//! across layers) fitting random white squares on black.
//!
//! ```text
//! cargo run --release --example square_patches -- [PATCH_SIZE] [EPOCHS]
//! ```

use hosc::harness::{compare_runs, default_output_root, preset, ActivationKind, ExperimentConfig};

fn main() -> hosc::Result<()> {
    let mut args = std::env::args().skip(1);
    let patch: usize = args.next().map_or(4, |a| a.parse().expect("PATCH_SIZE must be a number"));
    let epochs: usize = args.next().map_or(500, |a| a.parse().expect("EPOCHS must be a number"));

    // The full recipe is 256², 100 patches, width 256; this is a desk-sized cut.
    let mut hosc = preset(&format!("patches-{patch}"))?;
    hosc.name = "hosc".into();
    hosc.dataset.patch_image_size = 64;
    hosc.dataset.patch_count = 20;
    hosc.width = 64;
    hosc.epochs = epochs;
    hosc.lr = 1e-2;
    let relu = ExperimentConfig { name: "relu".into(), activation: ActivationKind::Relu, lr: 1e-2, ..hosc.clone() };
    let siren = ExperimentConfig { name: "siren".into(), activation: ActivationKind::Sine, lr: 1e-3, ..hosc.clone() };

    let cmp = compare_runs(&[relu, siren, hosc], 0, &default_output_root().join("square_patches"))?;
    print!("{}", std::fs::read_to_string(&cmp.summary_csv).expect("summary was just written"));
    Ok(())
}
