//! Fits a photo with ReLU, SIREN and HOSC networks and writes reconstructions,
//! residuals and PSNR curves.
//!
//! ```text
//! cargo run --release --example fit_image -- [EPOCHS] [IMAGE]
//! ```
//!
//! `IMAGE` is a PGM/PPM path or `builtin:cameraman-128` (the default).

use hosc::harness::{compare_runs, default_output_root, ActivationKind, DatasetKind, ExperimentConfig};

fn main() -> hosc::Result<()> {
    let mut args = std::env::args().skip(1);
    let epochs = args.next().map_or(300, |a| a.parse().expect("EPOCHS must be a number"));
    let image = args.next().unwrap_or_else(|| "builtin:cameraman-128".into());

    let mut base = ExperimentConfig {
        width: 128,
        depth: 4,
        epochs,
        eval_every: 10,
        ..Default::default()
    };
    base.dataset.kind = DatasetKind::Image;
    base.dataset.image = image;

    let runs = [
        ExperimentConfig { name: "relu".into(), activation: ActivationKind::Relu, lr: 1e-2, ..base.clone() },
        ExperimentConfig { name: "siren".into(), activation: ActivationKind::Sine, lr: 1e-4, ..base.clone() },
        ExperimentConfig { name: "hosc".into(), activation: ActivationKind::Hosc, sharpness: vec![8.0], lr: 3e-3, ..base },
    ];
    let out = default_output_root().join("fit_image");
    let cmp = compare_runs(&runs, 0, &out)?;
    for (c, r) in runs.iter().zip(&cmp.runs) {
        println!("{:<6} final PSNR {:6.2} dB  ({})", c.name, r.final_psnr, r.output_dir.display());
    }
    println!("per-epoch PSNR: {}", cmp.comparison_csv.display());
    Ok(())
}
