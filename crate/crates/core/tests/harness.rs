use hosc::harness::*;
use hosc::network::{load_checkpoint, Mlp, MlpSpec};
use hosc::signals::{read_pnm, save_point_samples, write_pnm, Image, SignalDataset, SignalKind};
use hosc::{Error, Matrix};

fn tiny(name: &str, dir: &std::path::Path) -> ExperimentConfig {
    let mut c = ExperimentConfig {
        name: name.into(),
        width: 16,
        depth: 2,
        epochs: 30,
        eval_every: 5,
        lr: 1e-3,
        output_dir: Some(dir.join(name)),
        render_resolution: 32,
        iou_resolution: 32,
        ..Default::default()
    };
    c.dataset.patch_image_size = 16;
    c.dataset.patch_count = 3;
    c.dataset.patch_size = 4;
    c
}

#[test]
fn zero_epochs_saves_the_initial_model() {
    let dir = tempfile::tempdir().unwrap();
    let c = ExperimentConfig { epochs: 0, ..tiny("zero", dir.path()) };
    let r = run_experiment(&c).unwrap();
    assert!(r.log.is_empty());
    assert_eq!(std::fs::read_to_string(&r.metrics_csv).unwrap(), "epoch,loss,psnr,lr,sharp_l0,sharp_l1\n");
    let init = Mlp::init(c.mlp_spec(2, 1).unwrap()).unwrap();
    assert_eq!(load_checkpoint(&r.checkpoint).unwrap(), init);
    for p in &r.renders {
        assert!(p.exists(), "{}", p.display());
    }
    assert!(r.output_dir.join("config.txt").exists());
}

#[test]
fn log_labels_follow_the_cadence() {
    let dir = tempfile::tempdir().unwrap();
    let c = ExperimentConfig { epochs: 12, eval_every: 5, ..tiny("cadence", dir.path()) };
    let data = build_dataset(&c.dataset, 0).unwrap();
    let (mlp, log) = train(&c, &data.dataset, |_| {}).unwrap();
    let epochs: Vec<usize> = log.records().iter().map(|r| r.epoch).collect();
    assert_eq!(epochs, vec![5, 10, 12]);
    // The last record is the loss of the returned model.
    let mse = dataset_mse(&mlp, &data.dataset).unwrap();
    assert_eq!(log.last().unwrap().loss, mse);
}

#[test]
fn loss_at_label_k_is_measured_after_k_updates() {
    let dir = tempfile::tempdir().unwrap();
    let base = tiny("order", dir.path());
    let data = build_dataset(&base.dataset, 0).unwrap();
    let (_, log) = train(&ExperimentConfig { epochs: 6, eval_every: 1, ..base.clone() }, &data.dataset, |_| {}).unwrap();
    for k in 1..=6 {
        let (mlp_k, _) = train(&ExperimentConfig { epochs: k, ..base.clone() }, &data.dataset, |_| {}).unwrap();
        let want = dataset_mse(&mlp_k, &data.dataset).unwrap();
        assert_eq!(log.records()[k - 1].loss, want, "epoch {k}");
    }
}

#[test]
fn two_point_linear_fit() {
    let coords = Matrix::from_rows(&[[-0.5], [0.5]]).unwrap();
    let targets = Matrix::from_rows(&[[-0.25], [0.75]]).unwrap();
    let ds = SignalDataset::on_unit_domain(coords, targets, SignalKind::Signal1d).unwrap();
    let c = ExperimentConfig {
        activation: ActivationKind::Relu,
        width: 16,
        depth: 2,
        epochs: 500,
        lr: 1e-2,
        eval_every: 50,
        ..Default::default()
    };
    let (_, log) = train(&c, &ds, |_| {}).unwrap();
    assert!(log.last().unwrap().loss < 1e-4, "{:?}", log.last());
}

#[test]
fn minibatch_training_is_reproducible_and_learns() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = tiny("mb", dir.path());
    c.dataset.kind = DatasetKind::Sdf3d;
    c.dataset.solid = Solid::Sphere;
    c.dataset.samples = 3000;
    c.batch_size = 256;
    c.epochs = 15;
    c.eval_every = 1;
    c.activation = ActivationKind::Relu;
    let data = build_dataset(&c.dataset, 0).unwrap();
    let (m1, l1) = train(&c, &data.dataset, |_| {}).unwrap();
    let (m2, l2) = train(&c, &data.dataset, |_| {}).unwrap();
    assert_eq!(m1, m2);
    assert_eq!(l1, l2);
    let first = l1.records()[0].loss;
    assert!(l1.last().unwrap().loss < first);
}

#[test]
fn adaptive_sharpness_moves_and_stays_positive() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = tiny("ada", dir.path());
    c.dataset.kind = DatasetKind::Star;
    c.dataset.grid_resolution = 24;
    c.adaptive_sharpness = true;
    c.eval_every = 1;
    let data = build_dataset(&c.dataset, 0).unwrap();
    let mut seen = Vec::new();
    let (mlp, _) = train(&c, &data.dataset, |r| seen.push(r.sharpness.clone())).unwrap();
    assert_eq!(seen.len(), 30);
    assert!(seen.iter().flatten().all(|&s| s > 0.0));
    assert!(mlp.sharpness_values().iter().all(|&s| (s - 8.0).abs() > 1e-6));
    // Frozen sharpness stays exactly put.
    c.adaptive_sharpness = false;
    let (mlp, _) = train(&c, &data.dataset, |_| {}).unwrap();
    assert_eq!(mlp.log_sharp(), &[8f64.ln(), 8f64.ln()]);
}

#[test]
fn non_finite_loss_aborts_with_epoch() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("huge.txt");
    std::fs::write(&pts, "0 0 1e300\n0.5 0.5 -1e300\n").unwrap();
    let mut c = tiny("nan", dir.path());
    c.dataset.kind = DatasetKind::Points;
    c.dataset.points_path = pts.display().to_string();
    c.eval_every = 1;
    match run_experiment(&c) {
        Err(Error::Numeric(msg)) => assert!(msg.contains("epoch"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn identical_configs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_experiment(&tiny("a", dir.path())).unwrap();
    let b = run_experiment(&tiny("b", dir.path())).unwrap();
    let read = |p: &std::path::Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a.metrics_csv), read(&b.metrics_csv));
    assert_eq!(read(&a.checkpoint), read(&b.checkpoint));
}

#[test]
fn compare_aligns_columns() {
    let dir = tempfile::tempdir().unwrap();
    let c = tiny("same", dir.path());
    let relu = ExperimentConfig { name: "relu".into(), activation: ActivationKind::Relu, ..c.clone() };
    let cmp = compare_runs(&[c.clone(), c, relu], 3, &dir.path().join("cmp")).unwrap();
    let csv = std::fs::read_to_string(&cmp.comparison_csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "epoch,psnr_same,psnr_same-2,psnr_relu");
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[1], cells[2]);
    }
    let summary = std::fs::read_to_string(&cmp.summary_csv).unwrap();
    assert_eq!(summary.lines().count(), 4);
    assert!(cmp.runs.iter().all(|r| r.output_dir.starts_with(dir.path().join("cmp"))));
}

#[test]
fn analytic_sdf_runs_report_iou() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = tiny("circle", dir.path());
    c.dataset.kind = DatasetKind::Circle;
    c.dataset.grid_resolution = 32;
    c.activation = ActivationKind::Relu;
    c.lr = 3e-3;
    c.epochs = 200;
    c.eval_every = 50;
    let r = run_experiment(&c).unwrap();
    let iou = r.iou.unwrap();
    assert!(iou > 0.8, "{iou}");
    assert!(std::fs::read_to_string(r.output_dir.join("final.txt")).unwrap().contains("iou = "));
}

#[test]
fn constant_network_renders_uniform_image() {
    let dir = tempfile::tempdir().unwrap();
    let mlp = Mlp::init(MlpSpec::relu(2, 1, 4, 1)).unwrap();
    let weights = mlp.weights().iter().map(|w| Matrix::zeros(w.rows(), w.cols())).collect();
    let biases = vec![Matrix::zeros(1, 4), Matrix::row_vector(&[0.4])];
    let mlp = Mlp::from_parts(mlp.spec().clone(), weights, biases, vec![0.0]).unwrap();
    let path = dir.path().join("c.pgm");
    render_image(&mlp, 7, 5, &path).unwrap();
    let img = read_pnm(&path).unwrap();
    assert_eq!((img.width, img.height), (7, 5));
    assert!(img.data.iter().all(|&v| v == 102.0 / 255.0));
}

#[test]
fn image_targets_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let img = load_image("builtin:cameraman-128").unwrap();
    let ds = img.to_dataset().unwrap();
    let path = dir.path().join("t.pgm");
    write_pnm(&path, &Image::from_matrix(128, 128, &ds.targets).unwrap()).unwrap();
    let back = read_pnm(&path).unwrap().to_dataset().unwrap();
    assert!(back.targets.max_abs_diff(&ds.targets).unwrap() <= 1.0 / 255.0);
}

#[test]
fn sphere_slice_has_negative_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = tiny("sphere", dir.path());
    c.dataset.kind = DatasetKind::Sdf3d;
    c.dataset.solid = Solid::Sphere;
    c.dataset.samples = 4000;
    c.activation = ActivationKind::Relu;
    c.width = 32;
    c.epochs = 300;
    c.lr = 3e-3;
    let data = build_dataset(&c.dataset, 0).unwrap();
    let (mlp, _) = train(&c, &data.dataset, |_| {}).unwrap();
    let v = sdf_slice_values(&mlp, Slice::default(), 33).unwrap();
    assert!(v.get(16, 16) < -0.1, "{}", v.get(16, 16));
    for (r, col) in [(0, 0), (0, 32), (32, 0), (32, 32)] {
        assert!(v.get(r, col) > 0.3);
    }
    let img = diverging_gray(&v, 1.0);
    assert!(img.get(16, 16, 0) < 0.5 && img.get(0, 0, 0) > 0.5);
    let path = dir.path().join("s.pgm");
    render_sdf_slice(&mlp, "axis=x,offset=0".parse().unwrap(), 16, &path).unwrap();
    assert!(path.exists());
}

#[test]
fn slice_parsing() {
    assert_eq!("axis=y,offset=0.25".parse::<Slice>().unwrap(), Slice { axis: SliceAxis::Y, offset: 0.25 });
    assert_eq!("".parse::<Slice>().unwrap(), Slice::default());
    assert!("axis=w".parse::<Slice>().is_err());
    assert!("offset=2".parse::<Slice>().is_err());
}

#[test]
fn point_files_train() {
    let dir = tempfile::tempdir().unwrap();
    let data = build_dataset(
        &DatasetSpec {
            kind: DatasetKind::Sdf3d,
            samples: 500,
            ..Default::default()
        },
        1,
    )
    .unwrap();
    let pts = dir.path().join("p.txt");
    save_point_samples(&data.dataset, &pts).unwrap();
    let mut c = tiny("pts", dir.path());
    c.dataset.kind = DatasetKind::Points;
    c.dataset.points_path = pts.display().to_string();
    let r = run_experiment(&c).unwrap();
    assert!(r.iou.is_none());
    assert_eq!(r.mlp.spec().in_dim, 3);
}

#[test]
fn output_root_env_var() {
    let c = ExperimentConfig { name: "x".into(), ..Default::default() };
    // Only this test touches the variable.
    std::env::set_var(OUTPUT_ROOT_ENV, "/tmp/hosc-root");
    assert_eq!(output_dir(&c), std::path::Path::new("/tmp/hosc-root/x"));
    std::env::remove_var(OUTPUT_ROOT_ENV);
    assert_eq!(output_dir(&c), std::path::Path::new("runs/x"));
}

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let c = load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        c.validate().unwrap();
        n += 1;
    }
    assert!(n >= 5);
}
