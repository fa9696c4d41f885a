//! Single-level db4 analysis of a test signal: filter-bank identities,
//! the 100 -> 53 coefficient dimensioning, and perfect reconstruction.
//!
//! Run with: `cargo run --example wavelet_decomposition`

use sigverify::transforms::{dwt_single, idwt_single, make_db4, wavedec};

fn main() {
    let fb = make_db4();
    println!("db4 filter bank (length {}):", fb.len());
    println!("  lo_d = {:?}", fb.lo_d);
    println!("  hi_d = {:?}", fb.hi_d);
    println!(
        "  sum(lo_d) = {:.15}  (sqrt(2) = {:.15})",
        fb.lo_d.iter().sum::<f64>(),
        std::f64::consts::SQRT_2
    );
    println!("  sum(hi_d) = {:+.3e}", fb.hi_d.iter().sum::<f64>());

    // A 100-sample chirp-like signal, the pipeline's channel length.
    let signal: Vec<f64> = (0..100)
        .map(|i| {
            let u = i as f64 / 99.0;
            (8.0 * std::f64::consts::PI * u * u).sin() + 0.25 * (20.0 * u).cos()
        })
        .collect();

    let (approx, detail) = dwt_single(&signal, &fb).expect("signal long enough");
    println!("\nsingle-level decomposition of {} samples:", signal.len());
    println!("  approximation: {} coefficients", approx.len());
    println!("  detail:        {} coefficients", detail.len());

    let energy = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    println!(
        "  energy split: {:.1}% approximation / {:.1}% detail",
        100.0 * energy(&approx) / (energy(&approx) + energy(&detail)),
        100.0 * energy(&detail) / (energy(&approx) + energy(&detail))
    );

    let reconstructed =
        idwt_single(&approx, &detail, &fb, signal.len()).expect("consistent lengths");
    let max_err = signal
        .iter()
        .zip(&reconstructed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("  max round-trip error: {max_err:.3e}");

    let pyramid = wavedec(&signal, &fb, 2).expect("two levels feasible");
    println!("\ntwo-level pyramid:");
    println!(
        "  level-1 detail: {} coefficients",
        pyramid.details[0].len()
    );
    println!(
        "  level-2 detail: {} coefficients",
        pyramid.details[1].len()
    );
    println!(
        "  deep approximation: {} coefficients",
        pyramid.approx.len()
    );
}
