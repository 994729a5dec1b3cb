//! End-to-end acceptance checks. Each criterion prints one line:
//!
//! ```text
//! [acceptance] criterion N (name): PASS|FAIL — details; runtime Xs (budget Ys)
//! ```
//!
//! and the process exits nonzero if any criterion fails. Pass criterion
//! numbers to run a subset: `cargo test --release --test acceptance -- 1 2 7`.
//!
//! Runtime budgets are reported, not enforced: they assume a multi-core
//! desktop, and the training criteria are compute bound.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hosc::activation::{hosc_dsharp, hosc_forward, square_wave, Activation};
use hosc::harness::{
    build_dataset, reference_iou, train, ActivationKind, DatasetKind, ExperimentConfig,
    PreparedData, PRESETS,
};
use hosc::metrics::{iou_occupancy, psnr, MetricsLog, ScalarGrid};
use hosc::optim::mse_loss;
use hosc::signals::{sdf_star, StarShape};
use hosc::{LrSchedule, Matrix, Mlp, MlpSpec, Rng};

fn report(n: usize, name: &str, pass: bool, detail: &str, start: Instant, budget_s: f64) -> bool {
    println!(
        "[acceptance] criterion {n} ({name}): {} — {detail}; runtime {:.1}s (budget {budget_s:.0}s)",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    pass
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn fit(config: &ExperimentConfig, data: &PreparedData) -> (Mlp, MetricsLog) {
    train(config, &data.dataset, |_| {}).expect("training run")
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness

fn loss_of(mlp: &Mlp, x: &Matrix, y: &Matrix) -> f64 {
    mse_loss(&mlp.predict(x).unwrap(), y).unwrap().0
}

/// Worst relative error of every analytic gradient coordinate against a
/// central difference with `h = 1e-6 · max(1, |θ|)`.
fn worst_gradient_error(mlp: &Mlp, x: &Matrix, y: &Matrix) -> f64 {
    let (pred, trace) = mlp.forward(x).unwrap();
    let (_, d_out) = mse_loss(&pred, y).unwrap();
    let g = mlp.backward(&trace, &d_out).unwrap();
    let mut worst: f64 = 0.0;
    let mut check = |analytic: f64, theta: f64, set: &dyn Fn(&mut Mlp, f64)| {
        let h = 1e-6 * theta.abs().max(1.0);
        let (mut p, mut m) = (mlp.clone(), mlp.clone());
        set(&mut p, theta + h);
        set(&mut m, theta - h);
        let numeric = (loss_of(&p, x, y) - loss_of(&m, x, y)) / (2.0 * h);
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-7);
        worst = worst.max(rel);
    };
    for l in 0..mlp.weights().len() {
        for i in 0..mlp.weights()[l].len() {
            let t = mlp.weights()[l].as_slice()[i];
            check(g.d_weights[l].as_slice()[i], t, &|m, v| m.weights_mut()[l].as_mut_slice()[i] = v);
        }
        for i in 0..mlp.biases()[l].len() {
            let t = mlp.biases()[l].as_slice()[i];
            check(g.d_biases[l].as_slice()[i], t, &|m, v| m.biases_mut()[l].as_mut_slice()[i] = v);
        }
    }
    for l in 0..mlp.hidden_layers() {
        if mlp.spec().activations[l].is_trainable() {
            let t = mlp.log_sharp()[l];
            check(g.d_log_sharp[l], t, &|m, v| m.log_sharp_mut()[l] = v);
        }
    }
    worst
}

fn criterion_1_gradient_correctness() -> bool {
    let start = Instant::now();
    let mut rng = Rng::new(2024);
    let x = rng.uniform_matrix(-1.0, 1.0, 16, 2).unwrap();
    let y = rng.uniform_matrix(-1.0, 1.0, 16, 1).unwrap();
    let families = [
        ("relu", MlpSpec::relu(2, 1, 8, 2)),
        ("sine30", MlpSpec::siren(2, 1, 8, 2, 30.0)),
        ("hosc1", MlpSpec::hosc(2, 1, 8, &[1.0, 1.0], 1.0, false)),
        ("hosc8", MlpSpec::hosc(2, 1, 8, &[8.0, 8.0], 1.0, false)),
        ("adahosc", MlpSpec::hosc(2, 1, 8, &[8.0, 8.0], 1.0, true)),
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for (name, spec) in families {
        let mlp = Mlp::init(spec.with_seed(5)).unwrap();
        let worst = worst_gradient_error(&mlp, &x, &y);
        pass &= worst <= 1e-5;
        details.push(format!("{name} {worst:.1e}"));
    }
    report(1, "gradient correctness", pass, &format!("worst rel. error {}", details.join(", ")), start, 5.0)
}

// ---------------------------------------------------------------------------
// 2. HOSC analytic properties

fn criterion_2_hosc_properties() -> bool {
    let start = Instant::now();
    let sharps = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let xs: Vec<f64> = (0..=4000).map(|i| -4.0 * PI + 8.0 * PI * i as f64 / 4000.0).collect();
    let h = |x: f64, s: f64| hosc_forward(x, s).unwrap();

    let mut periodic: f64 = 0.0;
    let mut odd: f64 = 0.0;
    let mut bounded = true;
    for &s in &sharps {
        for &x in &xs {
            periodic = periodic.max((h(x + 2.0 * PI, s) - h(x, s)).abs());
            odd = odd.max((h(-x, s) + h(x, s)).abs());
            bounded &= h(x, s).abs() < 1.0;
        }
    }
    let square_gap = xs
        .iter()
        .filter(|x| x.sin().abs() >= 0.1)
        .map(|&x| (h(x, 100.0) - square_wave(x)).abs())
        .fold(0.0, f64::max);

    // d/d♯ against central differences, with an absolute floor where it vanishes.
    let mut dsharp_err: f64 = 0.0;
    for &s in &sharps {
        for i in 0..=200 {
            let x = -PI + 2.0 * PI * i as f64 / 200.0;
            let step = 1e-6 * s;
            let fd = (h(x, s + step) - h(x, s - step)) / (2.0 * step);
            let an = hosc_dsharp(x, s).unwrap();
            dsharp_err = dsharp_err.max((an - fd).abs() / an.abs().max(1e-3));
        }
    }
    // The layer kernels must agree with the scalar definition.
    let act = Activation::Hosc { sharp: 8.0, freq: 1.0, trainable: false };
    let kernel_ok = xs.iter().all(|&x| (act.forward(x) - h(x, 8.0)).abs() < 1e-15);

    let pass = periodic <= 1e-12 && odd <= 1e-12 && bounded && square_gap <= 1e-8 && dsharp_err <= 1e-6 && kernel_ok;
    let detail = format!(
        "periodicity {periodic:.1e}, odd symmetry {odd:.1e}, bounded {bounded}, \
         max |hosc(x;100) − sign(sin x)| {square_gap:.1e}, d/d♯ rel. error {dsharp_err:.1e}"
    );
    report(2, "HOSC analytic properties", pass, &detail, start, 5.0)
}

// ---------------------------------------------------------------------------
// 3. Square-patch ordering

/// Learning rates per activation, each the best final PSNR of a
/// {1e-4, 3e-4, 1e-3, 3e-3, 1e-2} sweep on seed 0 of the same task.
const PATCH_LR_RELU: f64 = 1e-2;
const PATCH_LR_SIREN: f64 = 1e-3;
const PATCH_LR_HOSC: f64 = 1e-2;

fn patch_config(activation: ActivationKind, lr: f64, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        activation,
        sharpness: vec![2.0, 4.0, 8.0, 16.0],
        first_freq: 30.0,
        width: 64,
        depth: 4,
        epochs: 2000,
        lr,
        lr_schedule: LrSchedule::Constant,
        seed,
        data_seed: seed,
        eval_every: 100,
        ..Default::default()
    };
    c.dataset.kind = DatasetKind::Patches;
    c.dataset.patch_image_size = 64;
    c.dataset.patch_count = 20;
    c.dataset.patch_size = 4;
    c
}

fn criterion_3_square_patch_ordering() -> bool {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut margin_ok = true;
    let (mut hosc_all, mut siren_all) = (Vec::new(), Vec::new());
    for seed in 0..3 {
        let data = build_dataset(&patch_config(ActivationKind::Relu, 1.0, seed).dataset, seed).unwrap();
        let final_psnr = |a, lr| fit(&patch_config(a, lr, seed), &data).1.last().unwrap().psnr.unwrap();
        let relu = final_psnr(ActivationKind::Relu, PATCH_LR_RELU);
        let siren = final_psnr(ActivationKind::Sine, PATCH_LR_SIREN);
        let hosc = final_psnr(ActivationKind::Hosc, PATCH_LR_HOSC);
        margin_ok &= hosc >= relu + 3.0;
        hosc_all.push(hosc);
        siren_all.push(siren);
        rows.push(format!("seed {seed}: relu {relu:.2} siren {siren:.2} hosc {hosc:.2}"));
    }
    // The median seed is the one whose HOSC − SIREN gap is the median gap.
    let gaps: Vec<f64> = hosc_all.iter().zip(&siren_all).map(|(h, s)| h - s).collect();
    let median_gap = median(gaps);
    let pass = margin_ok && median_gap >= 0.0;
    let detail = format!(
        "final PSNR dB [{}]; hosc ≥ relu + 3 on every seed: {margin_ok}; median hosc − siren {median_gap:+.2}",
        rows.join("; ")
    );
    report(3, "square-patch ordering", pass, &detail, start, 900.0)
}

// ---------------------------------------------------------------------------
// 4. Photo fitting

/// Best final PSNR of the same sweep, on 200-epoch runs.
const PHOTO_LR_RELU: f64 = 1e-2;
const PHOTO_LR_HOSC: f64 = 3e-3;

fn photo_config(activation: ActivationKind, lr: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        activation,
        sharpness: vec![8.0],
        first_freq: 30.0,
        width: 128,
        depth: 4,
        epochs: 1000,
        lr,
        eval_every: 1,
        ..Default::default()
    };
    c.dataset.kind = DatasetKind::Image;
    c.dataset.image = "builtin:cameraman-128".into();
    c
}

fn criterion_4_photo_fitting() -> bool {
    let start = Instant::now();
    let data = build_dataset(&photo_config(ActivationKind::Relu, 1.0).dataset, 0).unwrap();
    let (_, relu) = fit(&photo_config(ActivationKind::Relu, PHOTO_LR_RELU), &data);
    let (_, hosc) = fit(&photo_config(ActivationKind::Hosc, PHOTO_LR_HOSC), &data);

    // Every threshold ReLU reaches: each whole dB up to its best, and its best.
    let relu_best = relu.max_psnr().unwrap();
    let first = relu.records()[0].psnr.unwrap().ceil() as i64;
    let mut thresholds: Vec<f64> = (first..=relu_best.floor() as i64).map(|t| t as f64).collect();
    thresholds.push(relu_best);
    let mut slower = Vec::new();
    for &t in &thresholds {
        let r = relu.epochs_to_psnr(t).unwrap();
        match hosc.epochs_to_psnr(t) {
            Some(h) if h < r => {}
            other => slower.push(format!("{t:.2} dB: hosc {other:?} vs relu {r}")),
        }
    }
    let (rf, hf) = (relu.last().unwrap().psnr.unwrap(), hosc.last().unwrap().psnr.unwrap());
    let pass = slower.is_empty() && hf > rf;
    let detail = format!(
        "final PSNR relu {rf:.2} dB, hosc {hf:.2} dB; {} thresholds up to {relu_best:.2} dB, hosc not faster on [{}]; \
         epochs to {relu_best:.2} dB: relu {:?}, hosc {:?}",
        thresholds.len(),
        slower.join("; "),
        relu.epochs_to_psnr(relu_best),
        hosc.epochs_to_psnr(relu_best)
    );
    report(4, "photo fitting", pass, &detail, start, 600.0)
}

// ---------------------------------------------------------------------------
// 5. 2D star SDF

/// Best final PSNR of the same sweep as the patch benchmark, on seed 0 and
/// 300-epoch runs.
const STAR_LR_RELU: f64 = 3e-3;
const STAR_LR_SIREN: f64 = 1e-4;
const STAR_LR_HOSC: f64 = 1e-2;
/// Tolerance for "monotone within noise" in the sharpness sweep.
const STAR_SWEEP_SLACK_DB: f64 = 0.5;

fn star_config(activation: ActivationKind, lr: f64, sharp: f64, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        activation,
        sharpness: vec![sharp],
        first_freq: 30.0,
        width: 128,
        depth: 4,
        epochs: 2000,
        lr,
        seed,
        eval_every: 10,
        iou_resolution: 128,
        ..Default::default()
    };
    c.dataset.kind = DatasetKind::Star;
    c.dataset.grid_resolution = 128;
    c
}

fn criterion_5_star_sdf() -> bool {
    let start = Instant::now();
    let data = build_dataset(&star_config(ActivationKind::Relu, 1.0, 1.0, 0).dataset, 0).unwrap();
    // IoU on the training lattice, plus the 2× finer lattice for reference.
    let run = |c: &ExperimentConfig| -> (f64, f64, f64) {
        let (mlp, log) = fit(c, &data);
        let iou = |res| reference_iou(&mlp, &data.reference, res).unwrap().unwrap();
        (iou(c.iou_resolution), iou(2 * c.iou_resolution - 1), log.max_psnr().unwrap())
    };
    let relu = run(&star_config(ActivationKind::Relu, STAR_LR_RELU, 1.0, 0));
    let siren = run(&star_config(ActivationKind::Sine, STAR_LR_SIREN, 1.0, 0));

    let sharps = [1.0, 2.0, 4.0, 8.0];
    let mut medians = Vec::new();
    let mut hosc = (f64::NAN, f64::NAN, f64::NAN);
    for &s in &sharps {
        let mut peaks = Vec::new();
        for seed in 0..3 {
            let r = run(&star_config(ActivationKind::Hosc, STAR_LR_HOSC, s, seed));
            if s == 8.0 && seed == 0 {
                hosc = r;
            }
            peaks.push(r.2);
        }
        medians.push(median(peaks));
    }
    let monotone = medians.windows(2).all(|w| w[1] >= w[0] - STAR_SWEEP_SLACK_DB) && medians[3] > medians[0];
    let pass = hosc.0 > relu.0 && hosc.0 > siren.0 && hosc.0 >= 0.98 && monotone;
    let sweep: Vec<String> = sharps.iter().zip(&medians).map(|(s, m)| format!("♯{s}: {m:.2}")).collect();
    let detail = format!(
        "IoU at 128² relu {:.4}, siren {:.4}, hosc(♯8) {:.4} (at 255²: {:.4}, {:.4}, {:.4}); \
         median max-PSNR dB [{}] monotone (±{STAR_SWEEP_SLACK_DB} dB): {monotone}",
        relu.0,
        siren.0,
        hosc.0,
        relu.1,
        siren.1,
        hosc.1,
        sweep.join(", ")
    );
    report(5, "2D star SDF", pass, &detail, start, 900.0)
}

// ---------------------------------------------------------------------------
// 6. 3D SDF with AdaHOSC

/// Best final PSNR of the same sweep, on full 20-epoch runs.
const SDF3D_LR_RELU: f64 = 1e-3;
const SDF3D_LR_SIREN: f64 = 1e-4;
const SDF3D_LR_HOSC: f64 = 1e-2;
const SDF3D_BATCH: usize = 1024;

fn sdf3d_config(activation: ActivationKind, lr: f64) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        activation,
        sharpness: vec![8.0],
        adaptive_sharpness: activation == ActivationKind::Hosc,
        first_freq: 30.0,
        width: 64,
        depth: 5,
        epochs: 20,
        batch_size: SDF3D_BATCH,
        lr,
        eval_every: 1,
        iou_resolution: 128,
        ..Default::default()
    };
    c.dataset.kind = DatasetKind::Sdf3d;
    c.dataset.samples = 200_000;
    c
}

fn criterion_6_sdf3d_adahosc() -> bool {
    let start = Instant::now();
    let data = build_dataset(&sdf3d_config(ActivationKind::Relu, 1.0).dataset, 0).unwrap();
    let run = |a, lr| {
        let c = sdf3d_config(a, lr);
        let (mlp, log) = fit(&c, &data);
        let iou = reference_iou(&mlp, &data.reference, c.iou_resolution).unwrap().unwrap();
        (iou, log)
    };
    let (relu, _) = run(ActivationKind::Relu, SDF3D_LR_RELU);
    let (siren, _) = run(ActivationKind::Sine, SDF3D_LR_SIREN);
    let (ada, log) = run(ActivationKind::Hosc, SDF3D_LR_HOSC);
    let positive = log.records().iter().flat_map(|r| &r.sharpness).all(|&s| s > 0.0);
    let last = &log.last().unwrap().sharpness;
    let moved = last.iter().all(|&s| (s - 8.0).abs() > 1e-6);
    let pass = ada >= 0.95 && ada > relu && ada > siren && positive && moved;
    let sharp: Vec<String> = last.iter().map(|s| format!("{s:.3}")).collect();
    let detail = format!(
        "IoU at 128³ relu {relu:.4}, siren {siren:.4}, adahosc {ada:.4}; sharpness positive {positive}, \
         final [{}] (initial 8)",
        sharp.join(", ")
    );
    report(6, "3D SDF with AdaHOSC", pass, &detail, start, 1200.0)
}

// ---------------------------------------------------------------------------
// 7. Metric oracles

fn criterion_7_metric_oracles() -> bool {
    let start = Instant::now();
    let zeros = Matrix::zeros(64, 64);
    let ones = Matrix::filled(64, 64, 1.0);
    let p0 = psnr(&zeros, &ones, 1.0).unwrap();

    let sphere = |r: f64| ScalarGrid::from_fn(256, 3, move |p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - r);
    let nested = iou_occupancy(&sphere(0.5).unwrap(), &sphere(1.0).unwrap()).unwrap();

    // Brute force: 10⁵ boundary samples, sign from the winding number.
    let star = StarShape::default();
    let v = star.vertices();
    let per_edge = 100_000 / v.len();
    let boundary: Vec<[f64; 2]> = (0..v.len())
        .flat_map(|e| {
            let (a, b) = (v[e], v[(e + 1) % v.len()]);
            (0..per_edge).map(move |k| {
                let t = k as f64 / per_edge as f64;
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            })
        })
        .collect();
    let winding = |p: [f64; 2]| -> f64 {
        (0..v.len())
            .map(|e| {
                let (a, b) = (v[e], v[(e + 1) % v.len()]);
                let (a0, a1) = ((a[1] - p[1]).atan2(a[0] - p[0]), (b[1] - p[1]).atan2(b[0] - p[0]));
                let mut d = a1 - a0;
                if d > PI {
                    d -= 2.0 * PI;
                } else if d < -PI {
                    d += 2.0 * PI;
                }
                d
            })
            .sum::<f64>()
            / (2.0 * PI)
    };
    let mut rng = Rng::new(77);
    let mut star_err: f64 = 0.0;
    for _ in 0..1000 {
        let p = [rng.next_f64() * 2.0 - 1.0, rng.next_f64() * 2.0 - 1.0];
        let dist = boundary
            .iter()
            .map(|q| (p[0] - q[0]).hypot(p[1] - q[1]))
            .fold(f64::INFINITY, f64::min);
        let oracle = if winding(p).round() != 0.0 { -dist } else { dist };
        star_err = star_err.max((sdf_star(p, &star) - oracle).abs());
    }
    let pass = p0 == 0.0 && (nested - 0.125).abs() <= 0.01 && star_err <= 1e-4;
    let detail = format!("PSNR(0 vs 1) = {p0} dB; nested-spheres IoU at 256³ = {nested:.5}; star SDF vs brute force max |Δ| = {star_err:.2e}");
    report(7, "metric oracles", pass, &detail, start, 60.0)
}

// ---------------------------------------------------------------------------
// 8. Determinism

/// Runs every preset twice through the binary with `--threads 1`, cut to two
/// epochs, and compares the CSV logs and checkpoints byte for byte.
fn criterion_8_determinism() -> bool {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    for name in PRESETS {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{name}-{rep}"));
            let status = std::process::Command::new(env!("CARGO_BIN_EXE_hosc"))
                .args(["--threads", "1", "fit", &format!("preset:{name}")])
                .args(["--set", "epochs=2", "--set", "eval_every=1", "--set"])
                .arg(format!("output_dir={}", out.display()))
                .stdout(std::process::Stdio::null())
                .status()
                .unwrap();
            assert!(status.success(), "preset {name} failed");
            let csv = std::fs::read(out.join("metrics.csv")).unwrap();
            let ckpt = std::fs::read(out.join("model.ckpt")).unwrap();
            outputs.push((csv, ckpt));
        }
        if outputs[0] != outputs[1] {
            mismatched.push(*name);
        }
    }
    let pass = mismatched.is_empty();
    let detail = format!(
        "{} presets run twice with --threads 1, 2 epochs each; differing CSV/checkpoint bytes: {:?}",
        PRESETS.len(),
        mismatched
    );
    report(8, "determinism", pass, &detail, start, 600.0)
}

const CRITERIA: [fn() -> bool; 8] = [
    criterion_1_gradient_correctness,
    criterion_2_hosc_properties,
    criterion_3_square_patch_ordering,
    criterion_4_photo_fitting,
    criterion_5_star_sdf,
    criterion_6_sdf3d_adahosc,
    criterion_7_metric_oracles,
    criterion_8_determinism,
];

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for n in 1..=CRITERIA.len() {
            println!("criterion_{n}: test");
        }
        return ExitCode::SUCCESS;
    }
    // Criterion numbers select a subset; libtest-style flags are ignored.
    let picked: Vec<usize> = args.iter().filter_map(|a| a.trim_start_matches("criterion_").parse().ok()).collect();
    let mut failed = Vec::new();
    for (i, criterion) in CRITERIA.iter().enumerate() {
        let n = i + 1;
        if (picked.is_empty() || picked.contains(&n)) && !criterion() {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("[acceptance] all selected criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("[acceptance] failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
