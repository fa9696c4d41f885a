//! Orthonormal DCT-II: energy preservation and reconstruction accuracy
//! from a handful of leading coefficients.
//!
//! Run with: `cargo run --example dct_energy_compaction`

use sigverify::transforms::{dct, idct, DctCoeffs};

fn main() {
    // Smooth signal: exactly the kind the DCT compacts well.
    let n = 100;
    let signal: Vec<f64> = (0..n)
        .map(|i| {
            let u = i as f64 / (n - 1) as f64;
            40.0 * (2.0 * std::f64::consts::PI * u).sin()
                + 10.0 * (6.0 * std::f64::consts::PI * u).sin()
        })
        .collect();

    let coeffs = dct(&signal).expect("nonempty");
    let signal_energy: f64 = signal.iter().map(|x| x * x).sum();
    let coeff_energy: f64 = coeffs.values.iter().map(|x| x * x).sum();
    println!("signal energy {signal_energy:.6}");
    println!("coefficient energy {coeff_energy:.6} (Parseval)");

    let back = idct(&coeffs).expect("nonempty");
    let max_err = signal
        .iter()
        .zip(&back)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("full round-trip max error: {max_err:.3e}\n");

    println!("reconstruction from the first k coefficients:");
    for k in [2, 5, 10, 25, 53, 100] {
        let mut truncated = coeffs.values.clone();
        for v in truncated.iter_mut().skip(k) {
            *v = 0.0;
        }
        let approx = idct(&DctCoeffs { values: truncated }).unwrap();
        let err: f64 = signal
            .iter()
            .zip(&approx)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            / signal_energy.sqrt();
        println!("  k = {k:>3}: relative L2 error {:.3e}", err);
    }
}
