//! FAR/FRR/EER computation and report emission.
//!
//! Score convention: higher means more genuine, and a sample is accepted
//! when `score >= threshold`. FAR is then non-increasing and FRR
//! non-decreasing in the threshold, so their crossing (the EER) is found
//! by a sweep over the distinct scores with linear interpolation at the
//! sign change.

use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("score set needs at least one genuine and one forgery score")]
    EmptyScores,
    #[error("score at index {index} is not finite")]
    NonFiniteScore { index: usize },
    #[error("need at least one signer report to aggregate")]
    NoSigners,
}

/// Decision scores for one signer's test set.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    genuine: Vec<f64>,
    forgery: Vec<f64>,
}

impl ScoreSet {
    pub fn new(genuine: Vec<f64>, forgery: Vec<f64>) -> Result<Self, EvalError> {
        if genuine.is_empty() || forgery.is_empty() {
            return Err(EvalError::EmptyScores);
        }
        for (index, v) in genuine.iter().chain(&forgery).enumerate() {
            if !v.is_finite() {
                return Err(EvalError::NonFiniteScore { index });
            }
        }
        Ok(Self { genuine, forgery })
    }

    pub fn genuine(&self) -> &[f64] {
        &self.genuine
    }

    pub fn forgery(&self) -> &[f64] {
        &self.forgery
    }
}

/// One point of the threshold sweep. Percentages in `[0, 100]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
}

/// FAR and FRR (in percent) at one threshold: FAR counts forgeries with
/// `score >= threshold`, FRR counts genuine samples below it.
pub fn far_frr_at(scores: &ScoreSet, threshold: f64) -> (f64, f64) {
    let fa = scores.forgery.iter().filter(|&&s| s >= threshold).count();
    let fr = scores.genuine.iter().filter(|&&s| s < threshold).count();
    (
        100.0 * fa as f64 / scores.forgery.len() as f64,
        100.0 * fr as f64 / scores.genuine.len() as f64,
    )
}

/// All distinct scores in ascending order, bracketed by -inf / +inf
/// sentinels (accept everything / reject everything).
fn sweep_thresholds(scores: &ScoreSet) -> Vec<f64> {
    let mut all: Vec<f64> = scores
        .genuine
        .iter()
        .chain(&scores.forgery)
        .copied()
        .collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup();
    let mut thresholds = Vec::with_capacity(all.len() + 2);
    thresholds.push(f64::NEG_INFINITY);
    thresholds.extend(all);
    thresholds.push(f64::INFINITY);
    thresholds
}

/// One [`RatePoint`] per distinct score plus the two sentinels, sorted by
/// threshold. The monotonicity of both rates is asserted on every call.
pub fn roc_points(scores: &ScoreSet) -> Vec<RatePoint> {
    let points: Vec<RatePoint> = sweep_thresholds(scores)
        .into_iter()
        .map(|threshold| {
            let (far, frr) = far_frr_at(scores, threshold);
            RatePoint {
                threshold,
                far,
                frr,
            }
        })
        .collect();
    for pair in points.windows(2) {
        assert!(
            pair[1].far <= pair[0].far && pair[1].frr >= pair[0].frr,
            "rate monotonicity violated between thresholds {} and {}",
            pair[0].threshold,
            pair[1].threshold
        );
    }
    points
}

/// Equal error rate in percent and the threshold where it occurs.
///
/// The sweep walks the ROC points; at the step where `FAR - FRR` changes
/// sign the crossing is linearly interpolated. When the difference is
/// exactly zero over a plateau of thresholds, the midpoint of that
/// plateau is reported.
pub fn compute_eer(scores: &ScoreSet) -> (f64, f64) {
    let points = roc_points(scores);
    let diff = |p: &RatePoint| p.far - p.frr;

    // Exact-zero plateau: report its midpoint.
    let zeros: Vec<&RatePoint> = points.iter().filter(|p| diff(p) == 0.0).collect();
    if !zeros.is_empty() {
        let first = zeros[0];
        let last = zeros[zeros.len() - 1];
        let threshold = plateau_midpoint(first.threshold, last.threshold);
        return (first.far, threshold);
    }

    for pair in points.windows(2) {
        let d0 = diff(&pair[0]);
        let d1 = diff(&pair[1]);
        if d0 > 0.0 && d1 < 0.0 {
            let u = d0 / (d0 - d1);
            let eer = pair[0].far + u * (pair[1].far - pair[0].far);
            let threshold = interpolate_threshold(pair[0].threshold, pair[1].threshold, u);
            return (eer, threshold);
        }
    }
    // FAR starts at 100 > FRR 0 and ends at 0 < FRR 100; a sign change
    // always exists, so this is unreachable for a valid ScoreSet.
    unreachable!("FAR - FRR must change sign over the sweep");
}

fn plateau_midpoint(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 0.0,
    }
}

fn interpolate_threshold(lo: f64, hi: f64, u: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => lo + u * (hi - lo),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 0.0,
    }
}

/// Per-signer evaluation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignerReport {
    pub signer_id: String,
    pub eer_pct: f64,
    pub eer_threshold: f64,
    /// FAR at the zero-score operating point (the SVM's natural boundary).
    pub far_at_zero_pct: f64,
    /// FRR at the zero-score operating point.
    pub frr_at_zero_pct: f64,
    pub n_genuine: usize,
    pub n_forgery: usize,
}

impl SignerReport {
    pub fn from_scores(signer_id: &str, scores: &ScoreSet) -> Self {
        let (eer_pct, eer_threshold) = compute_eer(scores);
        let (far_at_zero_pct, frr_at_zero_pct) = far_frr_at(scores, 0.0);
        Self {
            signer_id: signer_id.to_string(),
            eer_pct,
            eer_threshold,
            far_at_zero_pct,
            frr_at_zero_pct,
            n_genuine: scores.genuine.len(),
            n_forgery: scores.forgery.len(),
        }
    }
}

/// Aggregate evaluation: per-signer rows plus the mean EER and the
/// correct-verification rate, which is `100 - mean EER` by definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub signers: Vec<SignerReport>,
    pub mean_eer_pct: f64,
    pub correct_rate_pct: f64,
    pub mode: String,
    pub config_snapshot: String,
}

/// Averages the per-signer EERs. Rows are sorted by signer id so emission
/// order never depends on evaluation order.
pub fn aggregate(
    mut signers: Vec<SignerReport>,
    mode: &str,
    config_snapshot: &str,
) -> Result<EvalReport, EvalError> {
    if signers.is_empty() {
        return Err(EvalError::NoSigners);
    }
    signers.sort_by(|a, b| a.signer_id.cmp(&b.signer_id));
    let mean_eer_pct = signers.iter().map(|s| s.eer_pct).sum::<f64>() / signers.len() as f64;
    Ok(EvalReport {
        signers,
        mean_eer_pct,
        correct_rate_pct: 100.0 - mean_eer_pct,
        mode: mode.to_string(),
        config_snapshot: config_snapshot.to_string(),
    })
}

/// Two-decimal half-up formatting for displayed percentages. Internal
/// arithmetic keeps full precision; this is display-only.
pub fn format_pct(value: f64) -> String {
    let rounded = (value * 100.0 + 0.5).floor() / 100.0;
    format!("{rounded:.2}")
}

/// Writes the per-signer report CSV:
/// `signer_id,mode,eer_pct,eer_threshold,far_at_zero_pct,frr_at_zero_pct,n_genuine,n_forgery`.
pub fn write_report_csv<W: Write>(report: &EvalReport, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "signer_id,mode,eer_pct,eer_threshold,far_at_zero_pct,frr_at_zero_pct,n_genuine,n_forgery"
    )?;
    for s in &report.signers {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.signer_id,
            report.mode,
            format_pct(s.eer_pct),
            s.eer_threshold,
            format_pct(s.far_at_zero_pct),
            format_pct(s.frr_at_zero_pct),
            s.n_genuine,
            s.n_forgery
        )?;
    }
    Ok(())
}

/// Writes the ROC CSV: `signer_id,threshold,far_pct,frr_pct`, one block
/// per signer in the given order.
pub fn write_roc_csv<W: Write>(
    blocks: &[(String, Vec<RatePoint>)],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "signer_id,threshold,far_pct,frr_pct")?;
    for (signer_id, points) in blocks {
        for p in points {
            writeln!(
                out,
                "{},{},{},{}",
                signer_id,
                p.threshold,
                format_pct(p.far),
                format_pct(p.frr)
            )?;
        }
    }
    Ok(())
}
