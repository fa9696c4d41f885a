//! The full pipeline on a synthetic corpus: generate, train per signer on
//! the training split, score the held-out test split, and report
//! FAR/FRR/EER per signer plus the aggregate correct-verification rate.
//!
//! Run with: `cargo run --release --example evaluate_synthetic`

use sigverify::config::PipelineConfig;
use sigverify::datasets::{generate_synthetic, SynthParams};
use sigverify::eval::format_pct;
use sigverify::pipeline::evaluate_all;

fn main() {
    let config = PipelineConfig::default();
    println!(
        "mode = {}, split = {} train genuine + {} train forgery per signer\n",
        config.mode, config.split.train_genuine, config.split.train_forgery
    );

    for distortion in [0.1, 0.3, 0.6] {
        let corpus = generate_synthetic(&SynthParams {
            distortion,
            ..SynthParams::default()
        })
        .expect("valid params");
        let output = evaluate_all(&corpus, &config).expect("evaluation runs");
        println!("distortion {distortion}:");
        for s in &output.report.signers {
            println!(
                "  {}: EER {:>6}%  (zero-threshold FAR {:>6}% / FRR {:>6}%)",
                s.signer_id,
                format_pct(s.eer_pct),
                format_pct(s.far_at_zero_pct),
                format_pct(s.frr_at_zero_pct)
            );
        }
        println!(
            "  mean_EER={}% correct_rate={}%\n",
            format_pct(output.report.mean_eer_pct),
            format_pct(output.report.correct_rate_pct)
        );
    }
}
