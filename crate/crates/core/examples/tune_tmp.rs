use hosc::harness::*;
use std::time::Instant;
fn main() {
    let mut c = ExperimentConfig::default();
    c.eval_every = 1;
    for a in std::env::args().skip(1) {
        let (k, v) = a.split_once('=').unwrap();
        if k == "preset" { let e = c.epochs; c = preset(v).unwrap(); c.epochs = e; continue; }
        c.set(k, v).unwrap();
    }
    let data = build_dataset(&c.dataset, c.data_seed).unwrap();
    let t = Instant::now();
    let (mlp, log) = train(&c, &data.dataset, |_| {}).unwrap();
    let recs = log.records();
    let pick: Vec<String> = recs.iter().filter(|r| r.epoch % (c.epochs / 10).max(1) == 0).map(|r| format!("{}:{:.2}", r.epoch, r.psnr.unwrap())).collect();
    if data.reference != Reference::None {
        let p = mlp.predict(&data.dataset.coords).unwrap();
        let (mut i, mut u) = (0, 0);
        for (a, b) in p.as_slice().iter().zip(data.dataset.targets.as_slice()) { if *a < 0.0 && *b < 0.0 { i += 1 } if *a < 0.0 || *b < 0.0 { u += 1 } }
        println!("train-iou {:.4}", i as f64 / u as f64);
        let half = hosc::metrics::eval_grid(&mlp, c.iou_resolution, data.dataset.in_dim()).unwrap();
        let neg = half.values.iter().filter(|v| **v < 0.0).count();
        println!("grid neg frac {:.4} max |v| {:.3}", neg as f64 / half.values.len() as f64, half.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let iou = reference_iou(&mlp, &data.reference, c.iou_resolution).unwrap();
    println!("{} lr={} final={:.3} max={:.3} iou={:?} sharp={:?} t={:.1}s\n  {}", c.activation.name(), c.lr, recs.last().unwrap().psnr.unwrap(), log.max_psnr().unwrap(), iou, mlp.sharpness_values(), t.elapsed().as_secs_f64(), pick.join(" "));
}
