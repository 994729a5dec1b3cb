//! Command-line front end for the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hosc::harness::{
    build_dataset, compare_runs, dataset_mse, default_output_root, load_config, preset, reference_iou, render_image,
    render_sdf_slice, run_experiment, ExperimentConfig, Slice,
};
use hosc::metrics::psnr_from_mse;
use hosc::network::load_checkpoint;
use hosc::{Error, Result};

#[derive(Parser)]
#[command(name = "hosc", version, about = "Fit, compare and render coordinate networks")]
struct Cli {
    /// Worker threads for grid evaluation (1 gives byte-identical outputs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one experiment. CONFIG is a config file or `preset:NAME`.
    Fit {
        config: String,
        /// Extra `key=value` overrides, applied last.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Train several configs on the same dataset and tabulate PSNR.
    Compare {
        #[arg(required = true)]
        configs: Vec<String>,
        /// Dataset seed shared by every run.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output directory (default: <output root>/compare).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a checkpoint to PGM/PPM.
    Render {
        checkpoint: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Render as a signed distance slice, e.g. `axis=z,offset=0`.
        #[arg(long)]
        slice: Option<Slice>,
        /// Pixels per side.
        #[arg(long, default_value_t = 256)]
        size: usize,
    },
    /// Report loss, PSNR and (for analytic shapes) IoU of a checkpoint.
    Eval {
        checkpoint: PathBuf,
        /// Config describing the dataset (file or `preset:NAME`).
        #[arg(long)]
        dataset: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn config_from(arg: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut config = match arg.strip_prefix("preset:") {
        Some(name) => preset(name)?,
        None => load_config(arg.as_ref())?,
    };
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {o:?} is not KEY=VALUE")))?;
        config
            .set(k.trim(), v.trim())
            .map_err(|m| Error::Config(format!("override {o:?}: {m}")))?;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Fit { config, overrides } => {
            let config = config_from(&config, &overrides)?;
            let r = run_experiment(&config)?;
            println!("output     {}", r.output_dir.display());
            println!("final_loss {}", r.final_loss);
            println!("final_psnr {:.3}", r.final_psnr);
            if let Some(iou) = r.iou {
                println!("iou        {iou:.5}");
            }
        }
        Command::Compare {
            configs,
            seed,
            overrides,
            out,
        } => {
            let configs = configs
                .iter()
                .map(|c| config_from(c, &overrides))
                .collect::<Result<Vec<_>>>()?;
            let out = out.unwrap_or_else(|| default_output_root().join("compare"));
            let cmp = compare_runs(&configs, seed, &out)?;
            print!("{}", std::fs::read_to_string(&cmp.summary_csv).map_err(|e| Error::Io {
                path: cmp.summary_csv.clone(),
                source: e,
            })?);
        }
        Command::Render {
            checkpoint,
            out,
            slice,
            size,
        } => {
            let mlp = load_checkpoint(&checkpoint)?;
            match slice {
                Some(s) => render_sdf_slice(&mlp, s, size, &out)?,
                None if mlp.spec().in_dim == 3 => render_sdf_slice(&mlp, Slice::default(), size, &out)?,
                None => render_image(&mlp, size, size, &out)?,
            }
            println!("wrote {}", out.display());
        }
        Command::Eval {
            checkpoint,
            dataset,
            overrides,
        } => {
            let mlp = load_checkpoint(&checkpoint)?;
            let config = config_from(&dataset, &overrides)?;
            let data = build_dataset(&config.dataset, config.data_seed)?;
            let mse = dataset_mse(&mlp, &data.dataset)?;
            println!("loss {mse}");
            println!("psnr {:.3}", psnr_from_mse(mse, 1.0));
            if let Some(iou) = reference_iou(&mlp, &data.reference, config.iou_resolution)? {
                println!("iou  {iou:.5}");
            }
        }
    }
    Ok(())
}

/// Exit status per error category.
fn exit_code(e: &Error) -> u8 {
    match e.category() {
        "config" => 2,
        "parse" => 3,
        "io" => 4,
        "numeric" => 5,
        _ => 6,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error ({}): {e}", e.category());
            ExitCode::from(exit_code(&e))
        }
    }
}
