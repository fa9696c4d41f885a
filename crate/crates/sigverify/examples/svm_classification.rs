//! Training the SMO-based SVM on one signer's reduced features and
//! reading its decision scores.
//!
//! Run with: `cargo run --example svm_classification`

use sigverify::config::PipelineConfig;
use sigverify::datasets::{generate_synthetic, SynthParams};
use sigverify::features::FeatureReducer;
use sigverify::pipeline::extract_features;
use sigverify::svm::{svm_decision, svm_train};
use sigverify::transforms::make_db4;

fn main() {
    let corpus = generate_synthetic(&SynthParams {
        n_signers: 1,
        n_genuine: 10,
        n_forgery: 10,
        distortion: 0.4,
        ..SynthParams::default()
    })
    .expect("valid params");
    let signer = &corpus.signers[0];
    let config = PipelineConfig::default();
    let fb = make_db4();

    let mut transform_rows = Vec::new();
    let mut stat_rows = Vec::new();
    for sig in signer.genuine.iter().chain(&signer.forgeries) {
        let (t, s) = extract_features(sig, &config, &fb).expect("valid signature");
        transform_rows.push(t);
        stat_rows.push(s);
    }
    let reducer = FeatureReducer::fit(&transform_rows, &stat_rows, 8, 2).expect("enough samples");
    let x: Vec<Vec<f64>> = transform_rows
        .iter()
        .zip(&stat_rows)
        .map(|(t, s)| reducer.reduce(t, s).unwrap().values)
        .collect();
    let y: Vec<i8> = (0..x.len()).map(|i| if i < 10 { 1 } else { -1 }).collect();

    let (model, diag) = svm_train(&x, &y, &config.svm_params()).expect("separable enough");
    println!(
        "trained SVM: {} support vectors, bias {:.4}",
        model.support_vectors.len(),
        model.bias
    );
    println!(
        "  sweeps {}  training accuracy {:.0}%  max KKT violation {:.2e}  |sum(alpha y)| {:.2e}",
        diag.sweeps,
        100.0 * diag.training_accuracy,
        diag.max_kkt_violation,
        diag.dual_constraint_residual.abs()
    );

    println!("\ndecision scores (positive = genuine side):");
    for (i, row) in x.iter().enumerate() {
        let score = svm_decision(&model, row).unwrap();
        println!(
            "  sample {:>2} ({}): {:+.4}",
            i,
            if y[i] == 1 { "genuine" } else { "forgery" },
            score
        );
    }
}
