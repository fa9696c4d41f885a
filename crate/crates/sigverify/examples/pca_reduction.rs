//! PCA over one signer's 477-dimensional transform features: fitting,
//! explained variance, and the 8 + 2 reduction to the classifier input.
//!
//! Run with: `cargo run --example pca_reduction`

use sigverify::datasets::{generate_synthetic, SynthParams};
use sigverify::features::{
    assemble_stat_features, assemble_transform_features, explained_variance, pca_fit,
    FeatureReducer,
};
use sigverify::signal::derive_channels;
use sigverify::transforms::{make_db4, PreprocessMode};

fn main() {
    let corpus = generate_synthetic(&SynthParams {
        n_signers: 1,
        n_genuine: 20,
        n_forgery: 1,
        ..SynthParams::default()
    })
    .expect("valid params");
    let signer = &corpus.signers[0];
    let fb = make_db4();

    let mut transform_rows = Vec::new();
    let mut stat_rows = Vec::new();
    for sig in &signer.genuine {
        let channels = derive_channels(sig, 100).unwrap();
        transform_rows
            .push(assemble_transform_features(&channels, PreprocessMode::DwtDct, &fb).unwrap());
        stat_rows.push(assemble_stat_features(&channels).unwrap());
    }

    let matrix: Vec<Vec<f64>> = transform_rows.iter().map(|r| r.values().to_vec()).collect();
    let model = pca_fit(&matrix, 8).expect("enough samples");
    let ev = explained_variance(&model);
    println!(
        "PCA on {} samples x {} dims, retaining 8 components:",
        matrix.len(),
        model.dimension()
    );
    for (i, (ratio, cum)) in ev.ratios.iter().zip(&ev.cumulative).enumerate() {
        println!(
            "  PC{:<2} explains {:>6.2}%  (cumulative {:>6.2}%)",
            i + 1,
            100.0 * ratio,
            100.0 * cum
        );
    }

    let reducer = FeatureReducer::fit(&transform_rows, &stat_rows, 8, 2).expect("enough samples");
    let reduced = reducer.reduce(&transform_rows[0], &stat_rows[0]).unwrap();
    println!(
        "\nreduced feature vector ({} = 8 transform + 2 stats, z-scored):",
        reduced.values.len()
    );
    println!("  {:?}", reduced.values);
}
