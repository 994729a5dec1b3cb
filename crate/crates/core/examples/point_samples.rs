//! Writes SDF samples of a torus to a text file, reads them back, and trains on
//! the file the way an external dataset would be used.
//!
//! ```text
//! cargo run --release --example point_samples
//! ```

use hosc::harness::{default_output_root, run_experiment, solid_shape, DatasetKind, ExperimentConfig, Solid};
use hosc::signals::{load_point_samples, sample_sdf3d, save_point_samples};
use hosc::Rng;

fn main() -> hosc::Result<()> {
    let dir = default_output_root().join("point_samples");
    std::fs::create_dir_all(&dir).map_err(|e| hosc::Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join("torus.txt");

    let samples = sample_sdf3d(&solid_shape(Solid::Torus), &mut Rng::new(0), 20_000, 0.5, 0.05)?;
    save_point_samples(&samples, &path)?;
    let loaded = load_point_samples(&path)?;
    println!("{} samples, bounds {:?} .. {:?}", loaded.len(), loaded.domain_lo, loaded.domain_hi);

    let mut config = ExperimentConfig {
        name: "torus".into(),
        width: 64,
        depth: 3,
        epochs: 10,
        batch_size: 1024,
        lr: 1e-3,
        eval_every: 1,
        output_dir: Some(dir.join("run")),
        ..Default::default()
    };
    config.dataset.kind = DatasetKind::Points;
    config.dataset.points_path = path.display().to_string();
    let run = run_experiment(&config)?;
    for r in run.log.records() {
        println!("epoch {:>2}  loss {:.3e}", r.epoch, r.loss);
    }
    println!("outputs in {}", run.output_dir.display());
    Ok(())
}
