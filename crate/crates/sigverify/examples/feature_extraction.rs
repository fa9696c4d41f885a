//! From a raw pen trajectory to the feature vectors the classifier sees:
//! nine channels, 53 transform coefficients per channel (477 total) and
//! 6 statistics per channel (54 total).
//!
//! Run with: `cargo run --example feature_extraction`

use sigverify::datasets::{generate_synthetic, SynthParams};
use sigverify::features::{assemble_stat_features, assemble_transform_features, channel_stats};
use sigverify::signal::derive_channels;
use sigverify::transforms::{make_db4, PreprocessMode};

fn main() {
    let corpus = generate_synthetic(&SynthParams {
        n_signers: 1,
        n_genuine: 1,
        n_forgery: 1,
        ..SynthParams::default()
    })
    .expect("valid params");
    let sig = &corpus.signers[0].genuine[0];
    println!(
        "signature: {} points, signer {}, pressure range {:.0}..{:.0}",
        sig.points.len(),
        sig.signer_id,
        sig.points
            .iter()
            .map(|p| p.pressure)
            .fold(f64::INFINITY, f64::min),
        sig.points.iter().map(|p| p.pressure).fold(0.0f64, f64::max),
    );

    let channels = derive_channels(sig, 100).expect("valid signature");
    println!(
        "\nderived channels (each resampled to {} samples, z-scored):",
        channels.len()
    );
    for (channel, data) in channels.iter() {
        let stats = channel_stats(data).unwrap();
        println!(
            "  {:<9} min {:>7.3}  max {:>6.3}  skew {:>6.3}  exkurt {:>6.3}",
            channel.name(),
            stats[2],
            stats[3],
            stats[4],
            stats[5]
        );
    }

    let fb = make_db4();
    for mode in [
        PreprocessMode::Dwt,
        PreprocessMode::Dct,
        PreprocessMode::DwtDct,
    ] {
        let features = assemble_transform_features(&channels, mode, &fb).unwrap();
        let energy: f64 = features.values().iter().map(|v| v * v).sum();
        println!(
            "\n{} transform features: {} values, energy {:.3}",
            mode,
            features.values().len(),
            energy
        );
        println!(
            "  first block (x channel): {:?} ...",
            &features.values()[..4]
        );
    }

    let stats = assemble_stat_features(&channels).unwrap();
    println!("\nstatistical features: {} values", stats.values().len());
}
