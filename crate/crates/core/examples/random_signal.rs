//! Fits a random band-limited 1D signal and prints target vs. prediction.
//!
//! ```text
//! cargo run --release --example random_signal -- [MAX_FREQ]
//! ```

use hosc::harness::{predict_chunked, train, ExperimentConfig};
use hosc::metrics::psnr;
use hosc::signals::gen_signal1d;
use hosc::Rng;

fn main() -> hosc::Result<()> {
    let max_freq: f64 = std::env::args().nth(1).map_or(12.0, |a| a.parse().expect("MAX_FREQ must be a number"));
    let (modes, data) = gen_signal1d(&mut Rng::new(3), 6, max_freq, 512)?;
    for m in &modes {
        println!("mode: {:+.3} · sin(2π·{:.3}·x + {:.3})", m.amplitude, m.freq, m.phase);
    }

    for (name, activation) in [("sine", "sine"), ("hosc", "hosc")] {
        let mut config = ExperimentConfig {
            width: 64,
            depth: 3,
            epochs: 300,
            eval_every: 100,
            lr: 1e-3,
            ..Default::default()
        };
        config.set("activation", activation).expect("known activation");
        let (mlp, _) = train(&config, &data, |_| {})?;
        let pred = predict_chunked(&mlp, &data.coords)?;
        // The signal is not confined to [0, 1]; use its range as the peak.
        let range = data.targets.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs())) * 2.0;
        println!("{name:>5}: PSNR {:.2} dB (peak = signal range)", psnr(&pred, &data.targets, range)?);
    }
    Ok(())
}
