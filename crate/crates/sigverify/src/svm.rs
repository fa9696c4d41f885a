//! Binary support vector machine trained with simplified SMO.
//!
//! Training sets here are tens of points (one signer's training split), so
//! the simplified sequential-minimal-optimization scheme — first choice by
//! KKT violation scan, second choice randomized — is a better fit than a
//! full working-set solver. Decision values are kept as real scores; the
//! evaluation stage sweeps thresholds over them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum SvmError {
    #[error("vectors have different dimensions: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("training data contains a single class; need both +1 and -1 labels")]
    SingleClass,
    #[error("label at row {index} is {value}; labels must be +1 or -1")]
    BadLabel { index: usize, value: i8 },
    #[error("need at least 2 training rows, found {found}")]
    TooFewSamples { found: usize },
    #[error(
        "SMO failed to converge: {sweeps} sweeps, {remaining_violations} KKT violation(s) left, worst {max_violation:.3e}"
    )]
    NoConvergence {
        sweeps: usize,
        remaining_violations: usize,
        max_violation: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
}

impl std::str::FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(KernelKind::Linear),
            "rbf" => Ok(KernelKind::Rbf),
            other => Err(format!("unknown kernel '{other}' (expected linear or rbf)")),
        }
    }
}

/// Training hyperparameters.
///
/// `gamma = None` resolves to `1 / dimension` at training time, the usual
/// heuristic for z-scored inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub kernel: KernelKind,
    pub c: f64,
    pub gamma: Option<f64>,
    pub tol: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            kernel: KernelKind::Rbf,
            c: 1.0,
            gamma: None,
            tol: 1e-3,
            max_passes: 100,
            seed: 1,
        }
    }
}

/// Trained classifier: retained support vectors, their `alpha_i * y_i`
/// weights, the bias, and the resolved kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    pub alpha_y: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelKind,
    pub gamma: f64,
    pub c: f64,
    pub dimension: usize,
}

/// Post-training facts: sweep count, training accuracy at the zero
/// threshold, the worst residual KKT violation, and the dual-constraint
/// residual `sum(alpha_i y_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainDiagnostics {
    pub sweeps: usize,
    pub n_support_vectors: usize,
    pub training_accuracy: f64,
    pub max_kkt_violation: f64,
    pub dual_constraint_residual: f64,
}

/// Kernel value between two equal-dimension vectors.
pub fn kernel_eval(kernel: KernelKind, gamma: f64, u: &[f64], v: &[f64]) -> Result<f64, SvmError> {
    if u.len() != v.len() {
        return Err(SvmError::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(kernel_raw(kernel, gamma, u, v))
}

fn kernel_raw(kernel: KernelKind, gamma: f64, u: &[f64], v: &[f64]) -> f64 {
    match kernel {
        KernelKind::Linear => u.iter().zip(v).map(|(a, b)| a * b).sum(),
        KernelKind::Rbf => {
            let dist_sq: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
            (-gamma * dist_sq).exp()
        }
    }
}

/// Decision value `sum_i alpha_i y_i K(sv_i, x) + b`. Positive sign means
/// the genuine class; the magnitude is the verification score.
pub fn svm_decision(model: &SvmModel, x: &[f64]) -> Result<f64, SvmError> {
    if x.len() != model.dimension {
        return Err(SvmError::DimensionMismatch {
            left: model.dimension,
            right: x.len(),
        });
    }
    let mut acc = model.bias;
    for (sv, ay) in model.support_vectors.iter().zip(&model.alpha_y) {
        acc += ay * kernel_raw(model.kernel, model.gamma, sv, x);
    }
    Ok(acc)
}

/// Smallest productive alpha step; updates below this are treated as no
/// progress.
const MIN_ALPHA_STEP: f64 = 1e-7;

/// Relative snap width: alphas within `c * ALPHA_SNAP` of a bound are set
/// onto it, so floating-point residue never masquerades as a free
/// multiplier.
const ALPHA_SNAP: f64 = 1e-12;

/// Trains the dual problem with simplified SMO.
///
/// A sweep scans every point in seeded-shuffled order; for each
/// KKT-violating point the partner is searched in a second shuffled order
/// until one admits a productive step. Training converges when a full
/// sweep finds no violation beyond `tol`. If `max_passes` consecutive
/// sweeps make no progress while violations remain (or the hard sweep
/// budget runs out), training fails with diagnostics.
pub fn svm_train(
    x: &[Vec<f64>],
    y: &[i8],
    params: &SvmParams,
) -> Result<(SvmModel, TrainDiagnostics), SvmError> {
    let m = x.len();
    if m < 2 {
        return Err(SvmError::TooFewSamples { found: m });
    }
    if y.len() != m {
        return Err(SvmError::DimensionMismatch {
            left: m,
            right: y.len(),
        });
    }
    let d = x[0].len();
    for row in x {
        if row.len() != d {
            return Err(SvmError::DimensionMismatch {
                left: d,
                right: row.len(),
            });
        }
    }
    for (i, &label) in y.iter().enumerate() {
        if label != 1 && label != -1 {
            return Err(SvmError::BadLabel {
                index: i,
                value: label,
            });
        }
    }
    if y.iter().all(|&l| l == y[0]) {
        return Err(SvmError::SingleClass);
    }

    let gamma = params.gamma.unwrap_or(1.0 / d as f64);
    let c = params.c;
    let tol = params.tol;
    let labels: Vec<f64> = y.iter().map(|&l| l as f64).collect();

    // Full kernel matrix; m is tens of points.
    let kmat: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| kernel_raw(params.kernel, gamma, &x[i], &x[j]))
                .collect()
        })
        .collect();

    let mut alpha = vec![0.0f64; m];
    let mut bias = 0.0f64;
    let mut rng = SplitMix64::keyed(params.seed, &[m as u64, d as u64]);

    let decision = |alpha: &[f64], bias: f64, i: usize| -> f64 {
        let mut acc = bias;
        for j in 0..m {
            if alpha[j] != 0.0 {
                acc += alpha[j] * labels[j] * kmat[j][i];
            }
        }
        acc
    };

    // Pairwise updates cancel the bias out of E_i - E_j, so the alphas can
    // reach the optimum while the running bias drifts. This recovers the
    // KKT-consistent bias for the current alphas: the mean over free
    // support vectors, or the midpoint of the feasible interval when every
    // alpha sits at a bound.
    let optimal_bias = |alpha: &[f64]| -> f64 {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        let mut free_sum = 0.0;
        let mut free_count = 0usize;
        for i in 0..m {
            let raw = decision(alpha, 0.0, i);
            let target = labels[i] - raw;
            if alpha[i] > 0.0 && alpha[i] < c {
                free_sum += target;
                free_count += 1;
            } else if (alpha[i] <= 0.0 && labels[i] > 0.0) || (alpha[i] >= c && labels[i] < 0.0) {
                lo = lo.max(target);
            } else {
                hi = hi.min(target);
            }
        }
        if free_count > 0 {
            free_sum / free_count as f64
        } else if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        }
    };

    let hard_budget = params.max_passes.saturating_mul(200).max(1000);
    let mut sweeps = 0usize;
    let mut stalled = 0usize;
    let mut converged = false;

    let mut first_order: Vec<usize> = (0..m).collect();
    let mut second_order: Vec<usize> = (0..m).collect();

    while sweeps < hard_budget {
        sweeps += 1;
        rng.shuffle(&mut first_order);
        let mut violations = 0usize;
        let mut changed = 0usize;

        for &i in &first_order {
            let e_i = decision(&alpha, bias, i) - labels[i];
            let r = labels[i] * e_i;
            let violates = (r < -tol && alpha[i] < c) || (r > tol && alpha[i] > 0.0);
            if !violates {
                continue;
            }
            violations += 1;

            rng.shuffle(&mut second_order);
            for &j in &second_order {
                if j == i {
                    continue;
                }
                let e_j = decision(&alpha, bias, j) - labels[j];
                let (lo, hi) = if labels[i] != labels[j] {
                    (
                        (alpha[j] - alpha[i]).max(0.0),
                        (c + alpha[j] - alpha[i]).min(c),
                    )
                } else {
                    (
                        (alpha[i] + alpha[j] - c).max(0.0),
                        (alpha[i] + alpha[j]).min(c),
                    )
                };
                if hi - lo <= 0.0 {
                    continue;
                }
                let eta = 2.0 * kmat[i][j] - kmat[i][i] - kmat[j][j];
                if eta >= 0.0 {
                    continue;
                }
                let new_j = (alpha[j] - labels[j] * (e_i - e_j) / eta).clamp(lo, hi);
                let delta_j = new_j - alpha[j];
                if delta_j.abs() < MIN_ALPHA_STEP {
                    continue;
                }
                let new_i = alpha[i] + labels[i] * labels[j] * (alpha[j] - new_j);

                let b1 = bias
                    - e_i
                    - labels[i] * (new_i - alpha[i]) * kmat[i][i]
                    - labels[j] * delta_j * kmat[i][j];
                let b2 = bias
                    - e_j
                    - labels[i] * (new_i - alpha[i]) * kmat[i][j]
                    - labels[j] * delta_j * kmat[j][j];
                bias = if new_i > 0.0 && new_i < c {
                    b1
                } else if new_j > 0.0 && new_j < c {
                    b2
                } else {
                    0.5 * (b1 + b2)
                };
                let snap = |a: f64| {
                    if a <= c * ALPHA_SNAP {
                        0.0
                    } else if a >= c * (1.0 - ALPHA_SNAP) {
                        c
                    } else {
                        a
                    }
                };
                alpha[i] = snap(new_i);
                alpha[j] = snap(new_j);
                changed += 1;
                break;
            }
        }

        if violations == 0 {
            converged = true;
            break;
        }
        bias = optimal_bias(&alpha);
        if changed == 0 {
            stalled += 1;
            if stalled >= params.max_passes {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    if !converged {
        // The sweep loop may have stopped right after its last alpha
        // update; settle the bias before judging the final state.
        bias = optimal_bias(&alpha);
    }

    // Residual KKT violation, measured exhaustively on the final state.
    let mut max_violation = 0.0f64;
    let mut remaining = 0usize;
    for i in 0..m {
        let r = labels[i] * (decision(&alpha, bias, i) - labels[i]);
        let v = if alpha[i] <= 0.0 {
            (-r).max(0.0)
        } else if alpha[i] >= c {
            r.max(0.0)
        } else {
            r.abs()
        };
        if v > tol {
            remaining += 1;
        }
        max_violation = max_violation.max(v);
    }
    if !converged && remaining > 0 {
        return Err(SvmError::NoConvergence {
            sweeps,
            remaining_violations: remaining,
            max_violation,
        });
    }

    let mut support_vectors = Vec::new();
    let mut alpha_y = Vec::new();
    for i in 0..m {
        if alpha[i] > 0.0 {
            support_vectors.push(x[i].clone());
            alpha_y.push(alpha[i] * labels[i]);
        }
    }
    let model = SvmModel {
        support_vectors,
        alpha_y,
        bias,
        kernel: params.kernel,
        gamma,
        c,
        dimension: d,
    };

    let mut correct = 0usize;
    for (row, &label) in x.iter().zip(y) {
        let score = svm_decision(&model, row)?;
        let predicted: i8 = if score >= 0.0 { 1 } else { -1 };
        if predicted == label {
            correct += 1;
        }
    }
    let dual_residual: f64 = alpha.iter().zip(&labels).map(|(a, l)| a * l).sum();

    let diagnostics = TrainDiagnostics {
        sweeps,
        n_support_vectors: model.support_vectors.len(),
        training_accuracy: correct as f64 / m as f64,
        max_kkt_violation: max_violation,
        dual_constraint_residual: dual_residual,
    };
    Ok((model, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn linear_params(c: f64) -> SvmParams {
        SvmParams {
            kernel: KernelKind::Linear,
            c,
            gamma: None,
            tol: 1e-3,
            max_passes: 100,
            seed: 7,
        }
    }

    #[test]
    fn kernel_values() {
        assert_eq!(
            kernel_eval(KernelKind::Linear, 1.0, &[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            0.0
        );
        let u = [1.5, -2.0, 0.25];
        assert!((kernel_eval(KernelKind::Rbf, 0.7, &u, &u).unwrap() - 1.0).abs() < 1e-15);
        // gamma = 0.5, u - v = (1, 1): exp(-0.5 * 2) = exp(-1)
        let k = kernel_eval(KernelKind::Rbf, 0.5, &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!((k - (-1.0f64).exp()).abs() < 1e-12);
        assert!(kernel_eval(KernelKind::Linear, 1.0, &[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn two_point_analytic_separator() {
        // +1 at (1, 0, ..), -1 at (-1, 0, ..): maximum margin hyperplane is
        // x1 = 0 with w = (1, 0, ..), b = 0.
        let dim = 4;
        let mut pos = vec![0.0; dim];
        pos[0] = 1.0;
        let mut neg = vec![0.0; dim];
        neg[0] = -1.0;
        let (model, diag) = svm_train(&[pos.clone(), neg], &[1, -1], &linear_params(10.0)).unwrap();
        let origin = vec![0.0; dim];
        assert!(svm_decision(&model, &origin).unwrap().abs() < 1e-6);
        assert!((svm_decision(&model, &pos).unwrap() - 1.0).abs() < 1e-3);
        assert_eq!(diag.training_accuracy, 1.0);
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(
            svm_train(&x, &[1, 1], &linear_params(1.0)).unwrap_err(),
            SvmError::SingleClass
        );
    }

    #[test]
    fn bad_label_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        assert_eq!(
            svm_train(&x, &[1, 0], &linear_params(1.0)).unwrap_err(),
            SvmError::BadLabel { index: 1, value: 0 }
        );
    }

    #[test]
    fn xor_with_rbf_reaches_full_training_accuracy() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let y = [1, 1, -1, -1];
        let params = SvmParams {
            kernel: KernelKind::Rbf,
            c: 10.0,
            gamma: Some(1.0),
            tol: 1e-3,
            max_passes: 100,
            seed: 3,
        };
        let (model, diag) = svm_train(&x, &y, &params).unwrap();
        for (row, &label) in x.iter().zip(&y) {
            let score = svm_decision(&model, row).unwrap();
            assert_eq!(score >= 0.0, label == 1, "row {row:?} score {score}");
        }
        assert_eq!(diag.training_accuracy, 1.0);
    }

    #[test]
    fn margin_support_vectors_sit_on_unit_margin() {
        // Points with 0 < alpha < C must satisfy y f(x) = 1 within ~tol.
        let mut rng = SplitMix64::new(12);
        let x: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let offset = if i % 2 == 0 { 2.0 } else { -2.0 };
                vec![offset + rng.range_f64(-0.8, 0.8), rng.range_f64(-1.0, 1.0)]
            })
            .collect();
        let y: Vec<i8> = (0..30).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let params = linear_params(5.0);
        let (model, diag) = svm_train(&x, &y, &params).unwrap();
        assert!(
            diag.max_kkt_violation <= params.tol,
            "{}",
            diag.max_kkt_violation
        );
        assert!(diag.dual_constraint_residual.abs() < 1e-6);
        // Verify the margin condition directly on interior support vectors.
        for (sv, &ay) in model.support_vectors.iter().zip(&model.alpha_y) {
            let a = ay.abs();
            if a > 1e-9 && a < model.c - 1e-9 {
                let label = ay.signum();
                let f = svm_decision(&model, sv).unwrap();
                assert!(
                    (label * f - 1.0).abs() <= params.tol * 10.0,
                    "{}",
                    label * f
                );
            }
        }
    }

    #[test]
    fn mirrored_dataset_decision_at_origin_is_zero() {
        let mut rng = SplitMix64::new(5);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..10 {
            let p: Vec<f64> = vec![rng.range_f64(0.5, 2.0), rng.range_f64(-1.0, 1.0)];
            let n: Vec<f64> = p.iter().map(|v| -v).collect();
            x.push(p);
            x.push(n);
            y.push(1);
            y.push(-1);
        }
        let (model, _) = svm_train(&x, &y, &linear_params(10.0)).unwrap();
        let score = svm_decision(&model, &[0.0, 0.0]).unwrap();
        assert!(score.abs() < 1e-3, "{score}");
    }

    #[test]
    fn separable_data_reaches_full_accuracy() {
        let mut rng = SplitMix64::new(42);
        let x: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let offset = if i < 25 { 3.0 } else { -3.0 };
                (0..4).map(|_| offset + rng.range_f64(-1.0, 1.0)).collect()
            })
            .collect();
        let y: Vec<i8> = (0..50).map(|i| if i < 25 { 1 } else { -1 }).collect();
        let (_, diag) = svm_train(&x, &y, &linear_params(100.0)).unwrap();
        assert_eq!(diag.training_accuracy, 1.0);
    }

    #[test]
    fn training_is_deterministic_given_seed() {
        let mut rng = SplitMix64::new(88);
        let x: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..3).map(|_| rng.range_f64(-2.0, 2.0)).collect())
            .collect();
        let y: Vec<i8> = (0..20).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let params = SvmParams {
            kernel: KernelKind::Rbf,
            c: 2.0,
            gamma: Some(0.5),
            tol: 1e-3,
            max_passes: 100,
            seed: 9,
        };
        let (m1, _) = svm_train(&x, &y, &params).unwrap();
        let (m2, _) = svm_train(&x, &y, &params).unwrap();
        assert_eq!(m1, m2);
        let probe = vec![0.3, -0.4, 1.1];
        assert_eq!(
            svm_decision(&m1, &probe).unwrap().to_bits(),
            svm_decision(&m2, &probe).unwrap().to_bits()
        );
    }

    #[test]
    fn alphas_respect_box_and_dual_constraint() {
        let mut rng = SplitMix64::new(17);
        let x: Vec<Vec<f64>> = (0..24)
            .map(|_| (0..3).map(|_| rng.range_f64(-1.5, 1.5)).collect())
            .collect();
        // Noisy labels force bounded-support behaviour (alpha at C).
        let y: Vec<i8> = (0..24)
            .map(|i| if (i * 7) % 3 == 0 { 1 } else { -1 })
            .collect();
        let params = SvmParams {
            kernel: KernelKind::Rbf,
            c: 1.0,
            gamma: Some(0.8),
            tol: 1e-3,
            max_passes: 100,
            seed: 2,
        };
        let (model, diag) = svm_train(&x, &y, &params).unwrap();
        for &ay in &model.alpha_y {
            assert!(ay.abs() <= model.c + 1e-12);
            assert!(ay.abs() > 0.0);
        }
        assert!(diag.dual_constraint_residual.abs() < 1e-6);
        assert!(diag.max_kkt_violation <= params.tol);
    }

    #[test]
    fn decision_rejects_wrong_dimension() {
        let (model, _) = svm_train(
            &[vec![1.0, 0.0], vec![-1.0, 0.0]],
            &[1, -1],
            &linear_params(1.0),
        )
        .unwrap();
        assert!(svm_decision(&model, &[1.0]).is_err());
    }
}
