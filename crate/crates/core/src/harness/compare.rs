use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::run::{run_experiment, RunResult};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Comparison {
    pub runs: Vec<RunResult>,
    pub comparison_csv: PathBuf,
    pub summary_csv: PathBuf,
}

/// Runs every config on the dataset drawn from `data_seed` and writes
/// `comparison.csv` (per-epoch PSNR, one column per run) and `summary.csv`
/// (one row per run) into `out_dir`. Runs go to `out_dir/<name>`; repeated
/// names get a numeric suffix.
pub fn compare_runs(configs: &[ExperimentConfig], data_seed: u64, out_dir: &Path) -> Result<Comparison> {
    if configs.is_empty() {
        return Err(Error::arg("nothing to compare"));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut names = Vec::new();
    let mut seen = HashSet::new();
    for c in configs {
        let mut name = c.name.clone();
        let mut k = 1;
        while !seen.insert(name.clone()) {
            k += 1;
            name = format!("{}-{k}", c.name);
        }
        names.push(name);
    }
    let mut runs = Vec::new();
    for (c, name) in configs.iter().zip(&names) {
        let mut c = c.clone();
        c.data_seed = data_seed;
        c.name = name.clone();
        c.output_dir = Some(out_dir.join(name));
        runs.push(run_experiment(&c)?);
    }

    let mut rows: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
    for (i, run) in runs.iter().enumerate() {
        for rec in run.log.records() {
            rows.entry(rec.epoch).or_insert_with(|| vec![None; runs.len()])[i] = rec.psnr;
        }
    }
    let mut csv = String::from("epoch");
    for n in &names {
        write!(csv, ",psnr_{n}").unwrap();
    }
    csv.push('\n');
    for (epoch, vals) in rows {
        write!(csv, "{epoch}").unwrap();
        for v in vals {
            csv.push(',');
            if let Some(v) = v {
                write!(csv, "{v}").unwrap();
            }
        }
        csv.push('\n');
    }
    let comparison_csv = out_dir.join("comparison.csv");
    std::fs::write(&comparison_csv, csv).map_err(|e| Error::io(&comparison_csv, e))?;

    let mut summary = String::from("name,activation,final_loss,final_psnr,max_psnr,iou\n");
    for ((run, name), c) in runs.iter().zip(&names).zip(configs) {
        let act = if c.adaptive_sharpness { "adahosc" } else { c.activation.name() };
        writeln!(
            summary,
            "{name},{act},{},{},{},{}",
            run.final_loss,
            run.final_psnr,
            run.log.max_psnr().map_or(String::new(), |p| p.to_string()),
            run.iou.map_or(String::new(), |v| v.to_string())
        )
        .unwrap();
    }
    let summary_csv = out_dir.join("summary.csv");
    std::fs::write(&summary_csv, summary).map_err(|e| Error::io(&summary_csv, e))?;
    Ok(Comparison {
        runs,
        comparison_csv,
        summary_csv,
    })
}
