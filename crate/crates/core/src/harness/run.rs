use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::data::{build_dataset, PreparedData, Reference};
use super::render::{diverging_gray, render_image, render_sdf_slice, sdf_slice_values, Slice};
use super::train::{predict_chunked, train};
use crate::error::{Error, Result};
use crate::metrics::{eval_grid, iou_occupancy, residual_image, MetricsLog, ScalarGrid};
use crate::network::{save_checkpoint, Mlp};
use crate::signals::{write_pnm, Image, SignalKind};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "HOSC_OUTPUT_ROOT";

/// Output root used when a config sets no `output_dir`.
pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from)
}

/// Where a run writes its files.
pub fn output_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .output_dir
        .clone()
        .unwrap_or_else(|| default_output_root().join(&config.name))
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub log: MetricsLog,
    pub mlp: Mlp,
    pub output_dir: PathBuf,
    pub checkpoint: PathBuf,
    pub metrics_csv: PathBuf,
    pub renders: Vec<PathBuf>,
    /// Full-dataset loss of the final model.
    pub final_loss: f64,
    pub final_psnr: f64,
    /// Occupancy IoU against the analytic shape, for analytic SDF datasets.
    pub iou: Option<f64>,
}

/// IoU of the network's zero level set against an analytic reference, on a
/// vertex grid of `resolution` per axis.
pub fn reference_iou(mlp: &Mlp, reference: &Reference, resolution: usize) -> Result<Option<f64>> {
    let truth = match reference {
        Reference::Shape2(s) => ScalarGrid::from_fn(resolution, 2, |p| s.sdf([p[0], p[1]]))?,
        Reference::Shape3(s) => ScalarGrid::from_fn(resolution, 3, |p| s.sdf([p[0], p[1], p[2]]))?,
        _ => return Ok(None),
    };
    let pred = eval_grid(mlp, resolution, truth.dims)?;
    iou_occupancy(&pred, &truth).map(Some)
}

/// Builds the dataset, trains, and writes `config.txt`, `metrics.csv`,
/// `model.ckpt`, renders, and `final.txt` into the run's output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult> {
    config.validate()?;
    let data = build_dataset(&config.dataset, config.data_seed)?;
    run_on_data(config, &data)
}

/// Like [`run_experiment`] with an already built dataset.
pub fn run_on_data(config: &ExperimentConfig, data: &PreparedData) -> Result<RunResult> {
    let dir = output_dir(config);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_file(&dir.join("config.txt"), &config.to_text())?;

    let (mlp, log) = train(config, &data.dataset, |_| {})?;

    let metrics_csv = dir.join("metrics.csv");
    write_file(&metrics_csv, &log.to_csv())?;
    let checkpoint = dir.join("model.ckpt");
    save_checkpoint(&mlp, &checkpoint)?;

    let pred = predict_chunked(&mlp, &data.dataset.coords)?;
    let (final_loss, _) = crate::optim::mse_loss(&pred, &data.dataset.targets)?;
    let final_psnr = crate::metrics::psnr_from_mse(final_loss, 1.0);
    let renders = write_renders(config, data, &mlp, &pred, &dir)?;
    let iou = reference_iou(&mlp, &data.reference, config.iou_resolution)?;

    let mut summary = format!("final_loss = {final_loss}\nfinal_psnr = {final_psnr}\n");
    if let Some(iou) = iou {
        writeln!(summary, "iou = {iou}").unwrap();
    }
    let sharp = mlp.sharpness_values();
    if !sharp.is_empty() {
        let s: Vec<String> = sharp.iter().map(f64::to_string).collect();
        writeln!(summary, "sharpness = {}", s.join(",")).unwrap();
    }
    write_file(&dir.join("final.txt"), &summary)?;

    Ok(RunResult {
        log,
        mlp,
        output_dir: dir,
        checkpoint,
        metrics_csv,
        renders,
        final_loss,
        final_psnr,
        iou,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_renders(
    config: &ExperimentConfig,
    data: &PreparedData,
    mlp: &Mlp,
    pred: &crate::tensor::Matrix,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let ds = &data.dataset;
    let ext = if ds.out_dim() == 3 { "ppm" } else { "pgm" };
    let mut out = Vec::new();
    match (ds.kind, ds.grid) {
        (SignalKind::Image, Some((w, h))) => {
            let recon = dir.join(format!("reconstruction.{ext}"));
            write_pnm(&recon, &Image::from_matrix(w, h, pred)?)?;
            let residual = residual_image(pred, &ds.targets)?;
            // Average channels so the residual is a single gray map.
            let c = residual.cols();
            let gray: Vec<f64> = (0..residual.rows())
                .map(|r| residual.row(r).iter().sum::<f64>() / c as f64)
                .collect();
            let res_path = dir.join("residual.pgm");
            write_pnm(&res_path, &Image::from_data(w, h, 1, gray)?)?;
            let target = dir.join(format!("target.{ext}"));
            write_pnm(&target, &Image::from_matrix(w, h, &ds.targets)?)?;
            out.extend([recon, res_path, target]);
            if config.render_resolution != w || config.render_resolution != h {
                let r = config.render_resolution;
                let path = dir.join(format!("render_{r}.{ext}"));
                render_image(mlp, r, r, &path)?;
                out.push(path);
            }
        }
        (SignalKind::Sdf2d | SignalKind::Sdf3d, _) => {
            let r = config.render_resolution.max(2);
            let path = dir.join("sdf_slice_z0.pgm");
            render_sdf_slice(mlp, Slice::default(), r, &path)?;
            out.push(path);
            let truth = match &data.reference {
                Reference::Shape2(s) => Some(ScalarGrid::from_fn(r, 2, |p| s.sdf([p[0], p[1]]))?),
                Reference::Shape3(s) => Some(ScalarGrid::from_fn(r, 2, |p| s.sdf([p[0], p[1], 0.0]))?),
                _ => None,
            };
            if let Some(t) = truth {
                let m = crate::tensor::Matrix::from_vec(r, r, t.values)?;
                let path = dir.join("sdf_slice_z0_target.pgm");
                write_pnm(&path, &diverging_gray(&m, 1.0))?;
                out.push(path);
            }
            // Also keep the raw slice values handy for plotting.
            let values = sdf_slice_values(mlp, Slice::default(), r)?;
            let path = dir.join("sdf_slice_z0.csv");
            let mut text = String::new();
            for row in 0..values.rows() {
                let cells: Vec<String> = values.row(row).iter().map(f64::to_string).collect();
                writeln!(text, "{}", cells.join(",")).unwrap();
            }
            write_file(&path, &text)?;
            out.push(path);
        }
        (SignalKind::Signal1d, _) => {
            let path = dir.join("signal.csv");
            let mut text = String::from("x,target,prediction\n");
            for r in 0..ds.len() {
                writeln!(text, "{},{},{}", ds.coords.get(r, 0), ds.targets.get(r, 0), pred.get(r, 0)).unwrap();
            }
            write_file(&path, &text)?;
            out.push(path);
        }
        _ => {}
    }
    Ok(out)
}
