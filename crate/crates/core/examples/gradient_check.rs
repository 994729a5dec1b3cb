//! Compares analytic gradients against central finite differences for every
//! parameter of a small AdaHOSC network, including the log-sharpness values.
//!
//! ```text
//! cargo run --release --example gradient_check
//! ```

use hosc::optim::mse_loss;
use hosc::{Mlp, MlpSpec, Rng};

fn loss(mlp: &Mlp, x: &hosc::Matrix, y: &hosc::Matrix) -> f64 {
    mse_loss(&mlp.predict(x).unwrap(), y).unwrap().0
}

fn main() -> hosc::Result<()> {
    let mut rng = Rng::new(7);
    let x = rng.uniform_matrix(-1.0, 1.0, 16, 2)?;
    let y = rng.uniform_matrix(-1.0, 1.0, 16, 1)?;
    let mlp = Mlp::init(MlpSpec::hosc(2, 1, 8, &[8.0, 8.0], 1.0, true).with_seed(1))?;

    let (pred, trace) = mlp.forward(&x)?;
    let (_, d_out) = mse_loss(&pred, &y)?;
    let grads = mlp.backward(&trace, &d_out)?;

    let mut worst: f64 = 0.0;
    let mut check = |analytic: f64, perturb: &dyn Fn(&mut Mlp, f64)| {
        let h = 1e-6;
        let (mut plus, mut minus) = (mlp.clone(), mlp.clone());
        perturb(&mut plus, h);
        perturb(&mut minus, -h);
        let numeric = (loss(&plus, &x, &y) - loss(&minus, &x, &y)) / (2.0 * h);
        let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-7);
        worst = worst.max(rel);
    };
    for l in 0..mlp.weights().len() {
        for i in 0..mlp.weights()[l].len() {
            check(grads.d_weights[l].as_slice()[i], &|m, h| m.weights_mut()[l].as_mut_slice()[i] += h);
        }
        for i in 0..mlp.biases()[l].len() {
            check(grads.d_biases[l].as_slice()[i], &|m, h| m.biases_mut()[l].as_mut_slice()[i] += h);
        }
    }
    for l in 0..mlp.hidden_layers() {
        println!("d loss / d log_sharp[{l}] = {:+.6e}", grads.d_log_sharp[l]);
        check(grads.d_log_sharp[l], &|m, h| m.log_sharp_mut()[l] += h);
    }
    println!("{} parameters, worst relative error {worst:.2e}", mlp.spec().parameter_count());
    Ok(())
}
