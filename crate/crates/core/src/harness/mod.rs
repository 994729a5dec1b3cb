//! Experiment runner: configs and presets, dataset construction, the training
//! loop, rendering, and multi-run comparisons.

mod compare;
mod config;
mod data;
mod render;
mod run;
mod train;

pub use compare::{compare_runs, Comparison};
pub use config::{
    load_config, parse_config, parse_schedule, preset, ActivationKind, DatasetKind, DatasetSpec, ExperimentConfig, Solid,
    PRESETS,
};
pub use data::{build_dataset, load_image, solid_shape, PreparedData, Reference, BUILTIN_IMAGES};
pub use render::{
    diverging_gray, predict_image, render_image, render_sdf_slice, sdf_slice_values, Slice, SliceAxis,
};
pub use run::{default_output_root, output_dir, reference_iou, run_experiment, run_on_data, RunResult, OUTPUT_ROOT_ENV};
pub use train::{dataset_mse, predict_chunked, train};
