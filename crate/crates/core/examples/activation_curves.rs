//! Tabulates HOSC for a few sharpness values and shows it closing in on the
//! square wave.
//!
//! ```text
//! cargo run --release --example activation_curves > curves.csv
//! ```

use std::f64::consts::PI;

use hosc::activation::{hosc_dsharp, hosc_forward, square_wave};

fn main() -> hosc::Result<()> {
    let sharps = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    print!("x,square");
    for s in sharps {
        print!(",hosc_{s},dsharp_{s}");
    }
    println!();
    for i in 0..=200 {
        let x = -2.0 * PI + 4.0 * PI * i as f64 / 200.0;
        print!("{x},{}", square_wave(x));
        for s in sharps {
            print!(",{},{}", hosc_forward(x, s)?, hosc_dsharp(x, s)?);
        }
        println!();
    }

    // Worst gap to sign(sin x) away from the zero crossings.
    for s in [4.0, 16.0, 64.0, 100.0] {
        let gap = (0..10_000)
            .map(|i| -PI + 2.0 * PI * i as f64 / 9_999.0)
            .filter(|x| x.sin().abs() >= 0.1)
            .map(|x| (hosc_forward(x, s).unwrap() - square_wave(x)).abs())
            .fold(0.0, f64::max);
        eprintln!("sharpness {s:>5}: max |hosc - square| = {gap:.3e}");
    }
    Ok(())
}
