//! Fits the signed distance field of a five-pointed star and measures how well
//! the zero level set matches the true outline.
//!
//! ```text
//! cargo run --release --example star_sdf -- [SHARPNESS] [EPOCHS]
//! ```

use hosc::harness::{build_dataset, default_output_root, reference_iou, render_sdf_slice, train, DatasetKind, ExperimentConfig, Slice};

fn main() -> hosc::Result<()> {
    let mut args = std::env::args().skip(1);
    let sharp: f64 = args.next().map_or(8.0, |a| a.parse().expect("SHARPNESS must be a number"));
    let epochs: usize = args.next().map_or(500, |a| a.parse().expect("EPOCHS must be a number"));

    let mut config = ExperimentConfig {
        sharpness: vec![sharp],
        width: 128,
        epochs,
        eval_every: 50,
        lr: 1e-2,
        ..Default::default()
    };
    config.dataset.kind = DatasetKind::Star;
    config.dataset.grid_resolution = 128;

    let data = build_dataset(&config.dataset, 0)?;
    let (mlp, _) = train(&config, &data.dataset, |r| {
        println!("epoch {:>5}  loss {:.3e}  psnr {:6.2}", r.epoch, r.loss, r.psnr.unwrap_or(f64::NAN));
    })?;
    // 128² is the training lattice; 255² adds every midpoint between samples.
    for res in [128, 255] {
        let iou = reference_iou(&mlp, &data.reference, res)?.expect("the star is analytic");
        println!("zero-level-set IoU at {res}²: {iou:.4}");
    }

    let dir = default_output_root().join("star_sdf");
    std::fs::create_dir_all(&dir).map_err(|e| hosc::Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join(format!("star_sharp{sharp}.pgm"));
    render_sdf_slice(&mlp, Slice::default(), 256, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
