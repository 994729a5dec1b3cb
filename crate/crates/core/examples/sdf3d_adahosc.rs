//! Learns a 3D signed distance field (a sphere with one octant cut away) with
//! trainable sharpness, printing each layer's sharpness as it adapts.
//!
//! ```text
//! cargo run --release --example sdf3d_adahosc -- [EPOCHS] [SAMPLES]
//! ```

use hosc::harness::{build_dataset, default_output_root, reference_iou, render_sdf_slice, train, DatasetKind, ExperimentConfig, Slice};

fn main() -> hosc::Result<()> {
    let mut args = std::env::args().skip(1);
    let epochs: usize = args.next().map_or(10, |a| a.parse().expect("EPOCHS must be a number"));
    let samples: usize = args.next().map_or(50_000, |a| a.parse().expect("SAMPLES must be a number"));

    let mut config = ExperimentConfig {
        width: 64,
        depth: 5,
        epochs,
        batch_size: 1024,
        adaptive_sharpness: true,
        lr: 1e-2,
        ..Default::default()
    };
    config.dataset.kind = DatasetKind::Sdf3d;
    config.dataset.samples = samples;

    let data = build_dataset(&config.dataset, 0)?;
    let (mlp, _) = train(&config, &data.dataset, |r| {
        let sharp: Vec<String> = r.sharpness.iter().map(|s| format!("{s:.3}")).collect();
        println!("epoch {:>3}  loss {:.3e}  sharpness [{}]", r.epoch, r.loss, sharp.join(", "));
    })?;
    let iou = reference_iou(&mlp, &data.reference, 96)?.expect("the solid is analytic");
    println!("occupancy IoU at 96³: {iou:.4}");

    let dir = default_output_root().join("sdf3d_adahosc");
    std::fs::create_dir_all(&dir).map_err(|e| hosc::Error::Io { path: dir.clone(), source: e })?;
    for axis in ["x", "z"] {
        let path = dir.join(format!("slice_{axis}.pgm"));
        render_sdf_slice(&mlp, format!("axis={axis},offset=0.1").parse::<Slice>()?, 256, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
