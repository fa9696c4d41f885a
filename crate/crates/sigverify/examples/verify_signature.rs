//! Enroll-and-verify flow: train per-signer models, persist them, reload,
//! and verify individual signatures against the calibrated thresholds.
//!
//! Run with: `cargo run --release --example verify_signature`

use sigverify::config::PipelineConfig;
use sigverify::datasets::{generate_synthetic, SynthParams};
use sigverify::pipeline::{train_all, verify, PersistedModel};

fn main() {
    let corpus = generate_synthetic(&SynthParams {
        n_signers: 3,
        distortion: 0.6,
        ..SynthParams::default()
    })
    .expect("valid params");
    let config = PipelineConfig::default();

    let model = train_all(&corpus, &config).expect("training converges");
    for s in &model.signers {
        println!(
            "enrolled {}: threshold {:+.4}, {} support vectors, train EER {:.2}%",
            s.signer_id,
            s.verify_threshold,
            s.svm.support_vectors.len(),
            s.diagnostics.train_eer_pct
        );
    }

    let dir = std::env::temp_dir().join("sigverify_example_model.json");
    model.save(&dir).expect("model saves");
    let reloaded = PersistedModel::load(&dir).expect("model loads");
    println!("\nmodel persisted to {} and reloaded\n", dir.display());

    let signer = &corpus.signers[0];
    for (kind, sig) in [
        ("genuine sample", &signer.genuine[15]),
        ("skilled forgery", &signer.forgeries[15]),
    ] {
        let verdict = verify(&reloaded, &signer.signer_id, sig, None).expect("verifiable");
        println!(
            "{} against {}: score {:+.4} vs threshold {:+.4} -> {}",
            kind, signer.signer_id, verdict.score, verdict.threshold, verdict.decision
        );
    }

    // A different signer's genuine signature acts as a random forgery.
    let imposter = &corpus.signers[1].genuine[0];
    let verdict = verify(&reloaded, &signer.signer_id, imposter, None).expect("verifiable");
    println!(
        "random forgery (signer {}'s genuine) against {}: score {:+.4} -> {}",
        corpus.signers[1].signer_id, signer.signer_id, verdict.score, verdict.decision
    );
}
