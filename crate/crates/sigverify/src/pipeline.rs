//! End-to-end orchestration: per-signer training, evaluation, model
//! persistence and single-signature verification.
//!
//! Per-signer protocol: the signer's samples are split into train and
//! test portions with a seeded shuffle; the PCA models and the SVM are
//! fitted on the training split only. Positives are the signer's training
//! genuine samples; negatives are the training forgeries, or other
//! signers' training genuine samples when the signer has none (the
//! random-forgery fallback). Signers may be processed in parallel; the
//! `SIGVERIFY_THREADS` environment variable caps the worker count.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, PipelineConfig};
use crate::datasets::{split, DatasetDescriptor, DatasetError, SignerRecord};
use crate::eval::{
    aggregate, compute_eer, roc_points, EvalError, EvalReport, RatePoint, ScoreSet, SignerReport,
};
use crate::features::{
    assemble_stat_features, assemble_transform_features, explained_variance, FeatureError,
    FeatureReducer, StatFeatureVector, TransformFeatureVector,
};
use crate::signal::{derive_channels_with, RawSignature, SignalError};
use crate::svm::{svm_decision, svm_train, SvmError, SvmModel, TrainDiagnostics};
use crate::transforms::{make_db4, TransformError, WaveletFilterBank};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot use {path}: {detail}")]
    UnreadableInput { path: String, detail: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("signer {signer_id}: {source}")]
    Training { signer_id: String, source: SvmError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("model has no signer '{signer_id}'")]
    UnknownSigner { signer_id: String },
    #[error("no signer has both test genuine and test forgery samples")]
    NoEvaluableSigner,
}

impl PipelineError {
    /// Exit-code contract: 0/1 are verification decisions, 2 I/O or
    /// unreadable input, 3 configuration, 4 data, 5 training
    /// non-convergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            PipelineError::Io { .. } | PipelineError::UnreadableInput { .. } => 2,
            PipelineError::Config(_) => 3,
            PipelineError::Feature(FeatureError::KTooLarge { .. }) => 3,
            PipelineError::Dataset(DatasetError::Io { .. }) => 2,
            PipelineError::Training {
                source: SvmError::NoConvergence { .. },
                ..
            } => 5,
            _ => 4,
        }
    }
}

/// Current on-disk model format.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Everything persisted for one signer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignerModel {
    pub signer_id: String,
    pub reducer: FeatureReducer,
    pub svm: SvmModel,
    /// Decision threshold calibrated to the training split's EER point.
    pub verify_threshold: f64,
    pub diagnostics: SignerDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignerDiagnostics {
    pub n_train_genuine: usize,
    pub n_train_forgery: usize,
    /// True when the negatives came from other signers' genuine samples.
    pub used_random_forgeries: bool,
    pub train_eer_pct: f64,
    pub svm: TrainDiagnostics,
    /// Cumulative explained-variance of the transform PCA.
    pub transform_eigenvalue_contribution: f64,
    /// Cumulative explained-variance of the stats PCA.
    pub stats_eigenvalue_contribution: f64,
}

/// The persisted model file: a versioned JSON document holding the config
/// snapshot and one entry per signer, sorted by signer id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistedModel {
    pub format_version: u32,
    pub config: PipelineConfig,
    pub signers: Vec<SignerModel>,
}

impl PersistedModel {
    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        let body = serde_json::to_string_pretty(self).expect("model serializes");
        std::fs::write(path, body).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let model: PersistedModel =
            serde_json::from_str(&text).map_err(|e| PipelineError::UnreadableInput {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(PipelineError::UnreadableInput {
                path: path.display().to_string(),
                detail: format!(
                    "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                    model.format_version
                ),
            });
        }
        Ok(model)
    }

    pub fn signer(&self, signer_id: &str) -> Option<&SignerModel> {
        self.signers.iter().find(|s| s.signer_id == signer_id)
    }
}

/// One signature's feature pair under a fixed config.
pub fn extract_features(
    sig: &RawSignature,
    config: &PipelineConfig,
    fb: &WaveletFilterBank,
) -> Result<(TransformFeatureVector, StatFeatureVector), PipelineError> {
    let channels = derive_channels_with(sig, config.resample_length, config.smoothing())?;
    let transform = assemble_transform_features(&channels, config.mode, fb)?;
    let stats = assemble_stat_features(&channels)?;
    Ok((transform, stats))
}

fn feature_rows(
    sigs: &[RawSignature],
    config: &PipelineConfig,
    fb: &WaveletFilterBank,
) -> Result<(Vec<TransformFeatureVector>, Vec<StatFeatureVector>), PipelineError> {
    let mut transforms = Vec::with_capacity(sigs.len());
    let mut stats = Vec::with_capacity(sigs.len());
    for sig in sigs {
        let (t, s) = extract_features(sig, config, fb)?;
        transforms.push(t);
        stats.push(s);
    }
    Ok((transforms, stats))
}

/// Fits one signer's reducer and SVM on the given training samples and
/// calibrates the verification threshold at the training EER point.
fn fit_signer(
    signer_id: &str,
    train_genuine: &[RawSignature],
    train_forgery: &[RawSignature],
    used_random_forgeries: bool,
    config: &PipelineConfig,
    fb: &WaveletFilterBank,
) -> Result<SignerModel, PipelineError> {
    let (mut t_rows, mut s_rows) = feature_rows(train_genuine, config, fb)?;
    let (t_neg, s_neg) = feature_rows(train_forgery, config, fb)?;
    let n_pos = t_rows.len();
    t_rows.extend(t_neg);
    s_rows.extend(s_neg);

    let reducer =
        FeatureReducer::fit(&t_rows, &s_rows, config.pca.transform_k, config.pca.stats_k)?;
    let mut x = Vec::with_capacity(t_rows.len());
    for (t, s) in t_rows.iter().zip(&s_rows) {
        x.push(reducer.reduce(t, s)?.values);
    }
    let y: Vec<i8> = (0..x.len())
        .map(|i| if i < n_pos { 1 } else { -1 })
        .collect();

    let (svm, svm_diag) =
        svm_train(&x, &y, &config.svm_params()).map_err(|source| PipelineError::Training {
            signer_id: signer_id.to_string(),
            source,
        })?;

    let mut genuine_scores = Vec::with_capacity(n_pos);
    let mut forgery_scores = Vec::with_capacity(x.len() - n_pos);
    for (i, row) in x.iter().enumerate() {
        let score = svm_decision(&svm, row).map_err(|source| PipelineError::Training {
            signer_id: signer_id.to_string(),
            source,
        })?;
        if i < n_pos {
            genuine_scores.push(score);
        } else {
            forgery_scores.push(score);
        }
    }
    let (train_eer_pct, verify_threshold) =
        compute_eer(&ScoreSet::new(genuine_scores, forgery_scores)?);

    let transform_ev = explained_variance(reducer.transform_pca());
    let stats_ev = explained_variance(reducer.stats_pca());
    Ok(SignerModel {
        signer_id: signer_id.to_string(),
        reducer,
        svm,
        verify_threshold,
        diagnostics: SignerDiagnostics {
            n_train_genuine: n_pos,
            n_train_forgery: x.len() - n_pos,
            used_random_forgeries,
            train_eer_pct,
            svm: svm_diag,
            transform_eigenvalue_contribution: *transform_ev.cumulative.last().unwrap(),
            stats_eigenvalue_contribution: *stats_ev.cumulative.last().unwrap(),
        },
    })
}

/// Training split plus negatives for one signer. When the signer has no
/// forgeries, negatives are drawn deterministically from the other
/// signers' training genuine samples.
fn training_material(
    record: &SignerRecord,
    descriptor: &DatasetDescriptor,
    config: &PipelineConfig,
) -> Result<(Vec<RawSignature>, Vec<RawSignature>, bool), PipelineError> {
    let seed = config.split.seed;
    if record.forgeries.is_empty() {
        let train_genuine = take_training_genuine(record, config)?;
        let mut pool = Vec::new();
        for other in &descriptor.signers {
            if other.signer_id == record.signer_id {
                continue;
            }
            pool.extend(take_training_genuine(other, config)?);
        }
        if pool.len() < config.split.train_forgery {
            return Err(DatasetError::NotEnoughSamples {
                requested: config.split.train_forgery,
                available: pool.len(),
                what: "random-forgery fallback",
            }
            .into());
        }
        let mut rng = crate::rng::SplitMix64::keyed(
            seed,
            &[crate::rng::fnv1a(record.signer_id.as_bytes()), 0x666f],
        );
        rng.shuffle(&mut pool);
        pool.truncate(config.split.train_forgery);
        Ok((train_genuine, pool, true))
    } else {
        let parts = split(
            record,
            config.split.train_genuine,
            config.split.train_forgery,
            seed,
        )?;
        Ok((parts.train.genuine, parts.train.forgeries, false))
    }
}

/// The signer's training genuine samples under the configured split.
/// Works for signers without forgeries, where [`split`] would refuse.
fn take_training_genuine(
    record: &SignerRecord,
    config: &PipelineConfig,
) -> Result<Vec<RawSignature>, PipelineError> {
    let n = config.split.train_genuine;
    if n + 1 > record.genuine.len() {
        return Err(DatasetError::NotEnoughSamples {
            requested: n,
            available: record.genuine.len(),
            what: "genuine",
        }
        .into());
    }
    let mut rng = crate::rng::SplitMix64::keyed(
        config.split.seed,
        &[crate::rng::fnv1a(record.signer_id.as_bytes())],
    );
    let mut genuine = record.genuine.clone();
    rng.shuffle(&mut genuine);
    genuine.truncate(n);
    Ok(genuine)
}

/// Builds a rayon pool sized by `SIGVERIFY_THREADS` when set.
fn worker_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var("SIGVERIFY_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                builder = builder.num_threads(n);
            }
        }
    }
    builder.build().expect("worker pool")
}

/// Trains every signer in the corpus and returns the persistable model.
pub fn train_all(
    descriptor: &DatasetDescriptor,
    config: &PipelineConfig,
) -> Result<PersistedModel, PipelineError> {
    config.validate()?;
    let fb = make_db4();
    let pool = worker_pool();
    let results: Vec<Result<SignerModel, PipelineError>> = pool.install(|| {
        descriptor
            .signers
            .par_iter()
            .map(|record| {
                let (genuine, negatives, fallback) = training_material(record, descriptor, config)?;
                fit_signer(
                    &record.signer_id,
                    &genuine,
                    &negatives,
                    fallback,
                    config,
                    &fb,
                )
            })
            .collect()
    });
    let mut signers = Vec::with_capacity(results.len());
    for result in results {
        signers.push(result?);
    }
    signers.sort_by(|a, b| a.signer_id.cmp(&b.signer_id));
    Ok(PersistedModel {
        format_version: MODEL_FORMAT_VERSION,
        config: config.clone(),
        signers,
    })
}

/// Per-signer evaluation output: the report row plus the ROC sweep.
#[derive(Debug, Clone)]
pub struct SignerEvaluation {
    pub report: SignerReport,
    pub roc: Vec<RatePoint>,
}

/// Full evaluation artifacts for one corpus run.
#[derive(Debug, Clone)]
pub struct EvaluationOutput {
    pub report: EvalReport,
    /// `(signer_id, roc points)`, sorted by signer id.
    pub roc: Vec<(String, Vec<RatePoint>)>,
    /// Signers skipped because they lack test genuine or forgery samples.
    pub skipped: Vec<(String, String)>,
}

/// Runs the full train-on-split / score-test protocol over every signer
/// and aggregates the report.
pub fn evaluate_all(
    descriptor: &DatasetDescriptor,
    config: &PipelineConfig,
) -> Result<EvaluationOutput, PipelineError> {
    config.validate()?;
    let fb = make_db4();
    let pool = worker_pool();

    enum Outcome {
        Evaluated(Box<SignerEvaluation>),
        Skipped(String, String),
    }

    let results: Vec<Result<Outcome, PipelineError>> = pool.install(|| {
        descriptor
            .signers
            .par_iter()
            .map(|record| {
                let parts = match split(
                    record,
                    config.split.train_genuine,
                    config.split.train_forgery,
                    config.split.seed,
                ) {
                    Ok(parts) => parts,
                    Err(err) => {
                        return Ok(Outcome::Skipped(record.signer_id.clone(), err.to_string()))
                    }
                };
                let model = fit_signer(
                    &record.signer_id,
                    &parts.train.genuine,
                    &parts.train.forgeries,
                    false,
                    config,
                    &fb,
                )?;
                let mut genuine_scores = Vec::with_capacity(parts.test.genuine.len());
                for sig in &parts.test.genuine {
                    genuine_scores.push(score_signature(&model, sig, config, &fb)?);
                }
                let mut forgery_scores = Vec::with_capacity(parts.test.forgeries.len());
                for sig in &parts.test.forgeries {
                    forgery_scores.push(score_signature(&model, sig, config, &fb)?);
                }
                let scores = ScoreSet::new(genuine_scores, forgery_scores)?;
                Ok(Outcome::Evaluated(Box::new(SignerEvaluation {
                    report: SignerReport::from_scores(&record.signer_id, &scores),
                    roc: roc_points(&scores),
                })))
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut roc = Vec::new();
    let mut skipped = Vec::new();
    for result in results {
        match result? {
            Outcome::Evaluated(eval) => {
                roc.push((eval.report.signer_id.clone(), eval.roc));
                rows.push(eval.report);
            }
            Outcome::Skipped(id, why) => skipped.push((id, why)),
        }
    }
    if rows.is_empty() {
        return Err(PipelineError::NoEvaluableSigner);
    }
    roc.sort_by(|a, b| a.0.cmp(&b.0));
    let report = aggregate(rows, config.mode.as_str(), &config.to_toml())?;
    Ok(EvaluationOutput {
        report,
        roc,
        skipped,
    })
}

/// Decision score of one signature under one signer's model.
pub fn score_signature(
    model: &SignerModel,
    sig: &RawSignature,
    config: &PipelineConfig,
    fb: &WaveletFilterBank,
) -> Result<f64, PipelineError> {
    let (t, s) = extract_features(sig, config, fb)?;
    let reduced = model.reducer.reduce(&t, &s)?;
    svm_decision(&model.svm, &reduced.values).map_err(|source| PipelineError::Training {
        signer_id: model.signer_id.clone(),
        source,
    })
}

/// Outcome of verifying one signature against an enrolled signer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub signer: String,
    pub score: f64,
    pub decision: &'static str,
    pub threshold: f64,
}

impl Verdict {
    pub fn is_genuine(&self) -> bool {
        self.decision == "genuine"
    }
}

/// Scores a signature against an enrolled signer and applies the
/// calibrated (or overridden) acceptance threshold.
pub fn verify(
    model: &PersistedModel,
    signer_id: &str,
    sig: &RawSignature,
    threshold_override: Option<f64>,
) -> Result<Verdict, PipelineError> {
    let signer = model
        .signer(signer_id)
        .ok_or_else(|| PipelineError::UnknownSigner {
            signer_id: signer_id.to_string(),
        })?;
    let fb = make_db4();
    let score = score_signature(signer, sig, &model.config, &fb)?;
    let threshold = threshold_override.unwrap_or(signer.verify_threshold);
    Ok(Verdict {
        signer: signer_id.to_string(),
        score,
        decision: if score >= threshold {
            "genuine"
        } else {
            "forgery"
        },
        threshold,
    })
}
