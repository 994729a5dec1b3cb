//! Flat `key = value` experiment configs.
//!
//! One setting per line, `#` starts a comment. A `preset = NAME` line loads a
//! built-in recipe first, wherever it appears; every other line overrides it.
//! Relative paths are resolved against the config file's directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::network::MlpSpec;
use crate::optim::LrSchedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivationKind {
    Relu,
    Sine,
    Hosc,
}

impl ActivationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ActivationKind::Relu => "relu",
            ActivationKind::Sine => "sine",
            ActivationKind::Hosc => "hosc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    /// A photo from a PGM/PPM file or a built-in asset.
    Image,
    /// Random white squares on black.
    Patches,
    /// Exact star SDF on a vertex grid.
    Star,
    /// Exact circle SDF on a vertex grid.
    Circle,
    /// Mixed uniform / near-surface samples of an analytic solid.
    Sdf3d,
    /// Samples read from a text file.
    Points,
    /// Random band-limited 1D signal.
    Signal1d,
}

impl DatasetKind {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::Image => "image",
            DatasetKind::Patches => "patches",
            DatasetKind::Star => "star",
            DatasetKind::Circle => "circle",
            DatasetKind::Sdf3d => "sdf3d",
            DatasetKind::Points => "points",
            DatasetKind::Signal1d => "signal1d",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solid {
    SphereMinusBox,
    Sphere,
    Cube,
    Torus,
}

impl Solid {
    pub fn name(&self) -> &'static str {
        match self {
            Solid::SphereMinusBox => "sphere-minus-box",
            Solid::Sphere => "sphere",
            Solid::Cube => "cube",
            Solid::Torus => "torus",
        }
    }
}

/// Everything needed to build the training set. Only the fields relevant to
/// `kind` are used.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    /// `builtin:NAME` or a PGM/PPM path.
    pub image: String,
    pub downsample: usize,
    pub patch_image_size: usize,
    pub patch_count: usize,
    pub patch_size: usize,
    pub grid_resolution: usize,
    pub star_points: usize,
    pub star_outer: f64,
    pub star_inner: f64,
    pub circle_radius: f64,
    pub solid: Solid,
    pub samples: usize,
    pub near_fraction: f64,
    pub near_sigma: f64,
    pub points_path: String,
    pub signal_modes: usize,
    pub signal_max_freq: f64,
    pub signal_samples: usize,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            kind: DatasetKind::Patches,
            image: "builtin:cameraman-256".into(),
            downsample: 1,
            patch_image_size: 256,
            patch_count: 100,
            patch_size: 4,
            grid_resolution: 256,
            star_points: 5,
            star_outer: 0.8,
            star_inner: 0.4,
            circle_radius: 0.5,
            solid: Solid::SphereMinusBox,
            samples: 200_000,
            near_fraction: 0.5,
            near_sigma: 0.05,
            points_path: String::new(),
            signal_modes: 8,
            signal_max_freq: 16.0,
            signal_samples: 1024,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Run name; also the output subdirectory under the output root.
    pub name: String,
    pub dataset: DatasetSpec,
    pub activation: ActivationKind,
    /// HOSC sharpness, one value for every layer or one per hidden layer.
    pub sharpness: Vec<f64>,
    /// Frequency of the first hidden layer (periodic activations only).
    pub first_freq: f64,
    /// Frequency of the later hidden layers. Defaults to `first_freq` for sine
    /// networks and 1 for HOSC.
    pub freq: Option<f64>,
    pub adaptive_sharpness: bool,
    pub width: usize,
    pub depth: usize,
    pub epochs: usize,
    /// Samples per step; 0 trains on the whole dataset at once.
    pub batch_size: usize,
    pub lr: f64,
    pub lr_schedule: LrSchedule,
    pub weight_decay: f64,
    /// Seeds initialization and shuffling.
    pub seed: u64,
    /// Seeds dataset generation.
    pub data_seed: u64,
    /// Log every this many epochs (and always after the last).
    pub eval_every: usize,
    pub output_dir: Option<PathBuf>,
    pub iou_resolution: usize,
    pub render_resolution: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "run".into(),
            dataset: DatasetSpec::default(),
            activation: ActivationKind::Hosc,
            sharpness: vec![8.0],
            first_freq: 30.0,
            freq: None,
            adaptive_sharpness: false,
            width: 256,
            depth: 4,
            epochs: 1000,
            batch_size: 0,
            lr: 1e-4,
            lr_schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            seed: 0,
            data_seed: 0,
            eval_every: 1,
            output_dir: None,
            iou_resolution: 128,
            render_resolution: 256,
        }
    }
}

pub const PRESETS: &[&str] = &[
    "cameraman-1000",
    "patches-1",
    "patches-4",
    "patches-16",
    "star-sdf",
    "sdf3d-adahosc",
    "hires-image",
];

/// Built-in experiment recipes.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig {
        name: name.to_string(),
        eval_every: 10,
        ..Default::default()
    };
    match name {
        "cameraman-1000" => {
            c.dataset.kind = DatasetKind::Image;
            c.dataset.image = "builtin:cameraman-256".into();
            c.sharpness = vec![8.0];
            c.epochs = 1000;
            c.lr_schedule = LrSchedule::StepDecay { gamma: 0.1, every: 2000 };
        }
        "patches-1" | "patches-4" | "patches-16" => {
            c.dataset.kind = DatasetKind::Patches;
            c.dataset.patch_size = name[8..].parse().expect("preset suffix");
            c.sharpness = vec![2.0, 4.0, 8.0, 16.0];
            c.epochs = 5000;
            c.lr_schedule = LrSchedule::StepDecay { gamma: 0.1, every: 2000 };
        }
        "star-sdf" => {
            c.dataset.kind = DatasetKind::Star;
            c.width = 512;
            c.epochs = 2000;
            c.iou_resolution = 256;
        }
        "sdf3d-adahosc" => {
            c.dataset.kind = DatasetKind::Sdf3d;
            c.depth = 5;
            c.epochs = 20;
            c.adaptive_sharpness = true;
            c.batch_size = 1024;
            c.eval_every = 1;
        }
        "hires-image" => {
            c.dataset.kind = DatasetKind::Image;
            c.dataset.image = "builtin:astronaut-512".into();
            c.epochs = 100;
            c.batch_size = 1 << 16;
            c.eval_every = 1;
            c.render_resolution = 512;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; available: {}",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(c)
}

impl ExperimentConfig {
    /// Sharpness of every hidden layer.
    pub fn layer_sharpness(&self) -> Vec<f64> {
        if self.sharpness.len() == 1 {
            vec![self.sharpness[0]; self.depth]
        } else {
            self.sharpness.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.width == 0 || self.depth == 0 {
            return fail(format!("width ({}) and depth ({}) must be at least 1", self.width, self.depth));
        }
        if self.eval_every == 0 {
            return fail("eval_every must be at least 1".into());
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail(format!("lr must be positive, got {}", self.lr));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return fail(format!("weight_decay must be non-negative, got {}", self.weight_decay));
        }
        self.lr_schedule.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.sharpness.len() != 1 && self.sharpness.len() != self.depth {
            return fail(format!(
                "sharpness lists {} values for {} hidden layers",
                self.sharpness.len(),
                self.depth
            ));
        }
        if self.adaptive_sharpness && self.activation != ActivationKind::Hosc {
            return fail("adaptive_sharpness requires activation = hosc".into());
        }
        if self.iou_resolution < 2 || self.render_resolution == 0 {
            return fail("iou_resolution must be ≥ 2 and render_resolution ≥ 1".into());
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return fail(format!("run name {:?} must be a plain directory name", self.name));
        }
        self.mlp_spec(1, 1)?.validate().map_err(|e| Error::Config(e.to_string()))?;
        let d = &self.dataset;
        match d.kind {
            DatasetKind::Image if d.downsample == 0 => fail("downsample must be at least 1".into()),
            DatasetKind::Patches if d.patch_size == 0 || d.patch_size > d.patch_image_size => fail(format!(
                "patch_size {} must be in 1..={}",
                d.patch_size, d.patch_image_size
            )),
            DatasetKind::Star | DatasetKind::Circle if d.grid_resolution == 0 => {
                fail("grid_resolution must be at least 1".into())
            }
            DatasetKind::Sdf3d if d.samples == 0 => fail("samples must be at least 1".into()),
            DatasetKind::Points if d.points_path.is_empty() => fail("points dataset needs points_path".into()),
            DatasetKind::Signal1d if d.signal_modes == 0 || d.signal_samples < 2 => {
                fail("signal1d needs signal_modes ≥ 1 and signal_samples ≥ 2".into())
            }
            _ => Ok(()),
        }
    }

    /// Network for a dataset with the given coordinate and value dimensions.
    pub fn mlp_spec(&self, in_dim: usize, out_dim: usize) -> Result<MlpSpec> {
        let spec = match self.activation {
            ActivationKind::Relu => MlpSpec::relu(in_dim, out_dim, self.width, self.depth),
            ActivationKind::Sine => {
                let later = self.freq.unwrap_or(self.first_freq);
                let acts = (0..self.depth)
                    .map(|l| Activation::sine(if l == 0 { self.first_freq } else { later }))
                    .collect();
                MlpSpec::new(in_dim, out_dim, self.width, acts)
            }
            ActivationKind::Hosc => {
                if self.sharpness.len() != 1 && self.sharpness.len() != self.depth {
                    return Err(Error::Config(format!(
                        "sharpness lists {} values for {} hidden layers",
                        self.sharpness.len(),
                        self.depth
                    )));
                }
                let later = self.freq.unwrap_or(1.0);
                let acts = self
                    .layer_sharpness()
                    .into_iter()
                    .enumerate()
                    .map(|(l, sharp)| Activation::Hosc {
                        sharp,
                        freq: if l == 0 { self.first_freq } else { later },
                        trainable: self.adaptive_sharpness,
                    })
                    .collect();
                MlpSpec::new(in_dim, out_dim, self.width, acts)
            }
        };
        Ok(spec.with_seed(self.seed))
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let d = &mut self.dataset;
        match key {
            "name" => self.name = value.to_string(),
            "dataset" => d.kind = parse_dataset_kind(value)?,
            "image" => d.image = value.to_string(),
            "downsample" => d.downsample = num(value)?,
            "patch_image_size" => d.patch_image_size = num(value)?,
            "patch_count" => d.patch_count = num(value)?,
            "patch_size" => d.patch_size = num(value)?,
            "grid_resolution" => d.grid_resolution = num(value)?,
            "star_points" => d.star_points = num(value)?,
            "star_outer" => d.star_outer = num(value)?,
            "star_inner" => d.star_inner = num(value)?,
            "circle_radius" => d.circle_radius = num(value)?,
            "solid" => d.solid = parse_solid(value)?,
            "samples" => d.samples = num(value)?,
            "near_fraction" => d.near_fraction = num(value)?,
            "near_sigma" => d.near_sigma = num(value)?,
            "points_path" => d.points_path = value.to_string(),
            "signal_modes" => d.signal_modes = num(value)?,
            "signal_max_freq" => d.signal_max_freq = num(value)?,
            "signal_samples" => d.signal_samples = num(value)?,
            "activation" => match value {
                "relu" => self.activation = ActivationKind::Relu,
                "sine" | "siren" => self.activation = ActivationKind::Sine,
                "hosc" => self.activation = ActivationKind::Hosc,
                "adahosc" => {
                    self.activation = ActivationKind::Hosc;
                    self.adaptive_sharpness = true;
                }
                other => return Err(format!("unknown activation {other:?} (relu, sine, hosc, adahosc)")),
            },
            "sharpness" => {
                self.sharpness = value
                    .split(',')
                    .map(|s| num(s.trim()))
                    .collect::<std::result::Result<_, _>>()?;
                if self.sharpness.is_empty() {
                    return Err("sharpness needs at least one value".into());
                }
            }
            "first_freq" => self.first_freq = num(value)?,
            "freq" => self.freq = if value == "auto" { None } else { Some(num(value)?) },
            "adaptive_sharpness" => self.adaptive_sharpness = boolean(value)?,
            "width" => self.width = num(value)?,
            "depth" => self.depth = num(value)?,
            "epochs" => self.epochs = num(value)?,
            "batch_size" => self.batch_size = num(value)?,
            "lr" => self.lr = num(value)?,
            "lr_schedule" => self.lr_schedule = parse_schedule(value)?,
            "weight_decay" => self.weight_decay = num(value)?,
            "seed" => self.seed = num(value)?,
            "data_seed" => self.data_seed = num(value)?,
            "eval_every" => self.eval_every = num(value)?,
            "output_dir" => self.output_dir = (!value.is_empty()).then(|| PathBuf::from(value)),
            "iou_resolution" => self.iou_resolution = num(value)?,
            "render_resolution" => self.render_resolution = num(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// The config as text that parses back to an equal value (without a preset line).
    pub fn to_text(&self) -> String {
        let d = &self.dataset;
        let sharp: Vec<String> = self.sharpness.iter().map(f64::to_string).collect();
        let schedule = match self.lr_schedule {
            LrSchedule::Constant => "constant".to_string(),
            LrSchedule::StepDecay { gamma, every } => format!("step:{gamma}:{every}"),
        };
        let mut pairs: Vec<(&str, String)> = vec![
            ("name", self.name.clone()),
            ("dataset", d.kind.name().into()),
            ("image", d.image.clone()),
            ("downsample", d.downsample.to_string()),
            ("patch_image_size", d.patch_image_size.to_string()),
            ("patch_count", d.patch_count.to_string()),
            ("patch_size", d.patch_size.to_string()),
            ("grid_resolution", d.grid_resolution.to_string()),
            ("star_points", d.star_points.to_string()),
            ("star_outer", d.star_outer.to_string()),
            ("star_inner", d.star_inner.to_string()),
            ("circle_radius", d.circle_radius.to_string()),
            ("solid", d.solid.name().into()),
            ("samples", d.samples.to_string()),
            ("near_fraction", d.near_fraction.to_string()),
            ("near_sigma", d.near_sigma.to_string()),
            ("points_path", d.points_path.clone()),
            ("signal_modes", d.signal_modes.to_string()),
            ("signal_max_freq", d.signal_max_freq.to_string()),
            ("signal_samples", d.signal_samples.to_string()),
            ("activation", self.activation.name().into()),
            ("sharpness", sharp.join(",")),
            ("first_freq", self.first_freq.to_string()),
            ("freq", self.freq.map_or("auto".into(), |f| f.to_string())),
            ("adaptive_sharpness", self.adaptive_sharpness.to_string()),
            ("width", self.width.to_string()),
            ("depth", self.depth.to_string()),
            ("epochs", self.epochs.to_string()),
            ("batch_size", self.batch_size.to_string()),
            ("lr", self.lr.to_string()),
            ("lr_schedule", schedule),
            ("weight_decay", self.weight_decay.to_string()),
            ("seed", self.seed.to_string()),
            ("data_seed", self.data_seed.to_string()),
            ("eval_every", self.eval_every.to_string()),
            ("iou_resolution", self.iou_resolution.to_string()),
            ("render_resolution", self.render_resolution.to_string()),
        ];
        if let Some(dir) = &self.output_dir {
            pairs.push(("output_dir", dir.display().to_string()));
        }
        let mut out = String::new();
        for (k, v) in pairs {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }
}

fn num<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("invalid number {value:?}"))
}

fn boolean(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("expected true or false, found {other:?}")),
    }
}

fn parse_dataset_kind(value: &str) -> std::result::Result<DatasetKind, String> {
    Ok(match value {
        "image" => DatasetKind::Image,
        "patches" => DatasetKind::Patches,
        "star" => DatasetKind::Star,
        "circle" => DatasetKind::Circle,
        "sdf3d" => DatasetKind::Sdf3d,
        "points" => DatasetKind::Points,
        "signal1d" => DatasetKind::Signal1d,
        other => return Err(format!("unknown dataset {other:?}")),
    })
}

fn parse_solid(value: &str) -> std::result::Result<Solid, String> {
    Ok(match value {
        "sphere-minus-box" => Solid::SphereMinusBox,
        "sphere" => Solid::Sphere,
        "cube" => Solid::Cube,
        "torus" => Solid::Torus,
        other => return Err(format!("unknown solid {other:?}")),
    })
}

/// `constant` or `step:GAMMA:EVERY`.
pub fn parse_schedule(value: &str) -> std::result::Result<LrSchedule, String> {
    if value == "constant" {
        return Ok(LrSchedule::Constant);
    }
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        ["step", gamma, every] => Ok(LrSchedule::StepDecay {
            gamma: num(gamma)?,
            every: num(every)?,
        }),
        _ => Err(format!("invalid lr_schedule {value:?} (constant or step:GAMMA:EVERY)")),
    }
}

fn split_line(raw: &str) -> Option<std::result::Result<(&str, &str), String>> {
    let line = raw.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return None;
    }
    Some(match line.split_once('=') {
        Some((k, v)) => Ok((k.trim(), v.trim())),
        None => Err(format!("expected `key = value`, found {line:?}")),
    })
}

/// Parses config text. `base_dir` anchors relative `image`, `points_path` and
/// `output_dir` values.
pub fn parse_config(text: &str, label: &str, base_dir: Option<&Path>) -> Result<ExperimentConfig> {
    let err = |line: usize, msg: String| Error::Parse {
        path: label.to_string(),
        line,
        msg,
    };
    let mut config = ExperimentConfig::default();
    let mut preset_line = None;
    for (i, raw) in text.lines().enumerate() {
        if let Some(Ok(("preset", name))) = split_line(raw) {
            if preset_line.is_some() {
                return Err(err(i + 1, "preset given twice".into()));
            }
            config = preset(name).map_err(|e| err(i + 1, e.to_string()))?;
            preset_line = Some(i);
        }
    }
    for (i, raw) in text.lines().enumerate() {
        let Some(kv) = split_line(raw) else { continue };
        let (key, value) = kv.map_err(|m| err(i + 1, m))?;
        if key == "preset" {
            continue;
        }
        let value = match (key, base_dir) {
            ("image", Some(base)) if !value.starts_with("builtin:") => resolve(base, value),
            ("points_path" | "output_dir", Some(base)) if !value.is_empty() => resolve(base, value),
            _ => value.to_string(),
        };
        config.set(key, &value).map_err(|m| err(i + 1, m))?;
    }
    Ok(config)
}

fn resolve(base: &Path, value: &str) -> String {
    let p = Path::new(value);
    if p.is_absolute() {
        value.to_string()
    } else {
        base.join(p).display().to_string()
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string(), path.parent())
}
