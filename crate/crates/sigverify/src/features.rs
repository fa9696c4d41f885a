//! Feature assembly and PCA reduction.
//!
//! Two views of every signature are built from its nine channels: the
//! transform view (53 coefficients per channel, 477 values) and the
//! statistical view (6 moments/extrema per channel, 54 values). Each view
//! gets its own PCA model; the projections are concatenated and z-scored
//! into the reduced vector the classifier consumes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::signal::ChannelSet;
use crate::transforms::{
    preprocess_channel, PreprocessMode, TransformError, WaveletFilterBank, COEFFS_PER_CHANNEL,
};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("channel of length {len} is too short for statistics (need >= 2)")]
    TooShort { len: usize },
    #[error("k = {k} exceeds the PCA retention limit min(samples - 1, dimension) = {limit}")]
    KTooLarge { k: usize, limit: usize },
    #[error("data has no variance; PCA directions are undefined")]
    DegenerateData,
    #[error("expected a vector of dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {min} sample rows, found {found}")]
    TooFewSamples { found: usize, min: usize },
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Statistics extracted per channel: mean, population standard deviation,
/// min, max, skewness, excess kurtosis.
pub const STATS_PER_CHANNEL: usize = 6;

/// Transform feature dimension: 9 channels x 53 coefficients.
pub const TRANSFORM_FEATURE_LEN: usize = 9 * COEFFS_PER_CHANNEL;

/// Statistical feature dimension: 9 channels x 6 statistics.
pub const STAT_FEATURE_LEN: usize = 9 * STATS_PER_CHANNEL;

/// Default PCA retention for the transform view.
pub const DEFAULT_TRANSFORM_K: usize = 8;

/// Default PCA retention for the statistical view.
pub const DEFAULT_STATS_K: usize = 2;

/// `[mean, population sigma, min, max, skewness, excess kurtosis]`.
///
/// Skewness and kurtosis of a (numerically) zero-variance channel are
/// defined as 0 rather than NaN.
pub fn channel_stats(channel: &[f64]) -> Result<[f64; STATS_PER_CHANNEL], FeatureError> {
    let n = channel.len();
    if n < 2 {
        return Err(FeatureError::TooShort { len: n });
    }
    let nf = n as f64;
    let mean = channel.iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &v in channel {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let sd = m2.sqrt();
    let min = channel.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = channel.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (skew, exkurt) = if m2 <= 1e-24 {
        (0.0, 0.0)
    } else {
        (m3 / (sd * sd * sd), m4 / (m2 * m2) - 3.0)
    };
    Ok([mean, sd, min, max, skew, exkurt])
}

/// The 477-value transform feature vector (channel-major blocks of 53).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformFeatureVector {
    values: Vec<f64>,
}

impl TransformFeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self, FeatureError> {
        if values.len() != TRANSFORM_FEATURE_LEN {
            return Err(FeatureError::DimensionMismatch {
                expected: TRANSFORM_FEATURE_LEN,
                found: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The 54-value statistical feature vector (channel-major blocks of 6).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatFeatureVector {
    values: Vec<f64>,
}

impl StatFeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self, FeatureError> {
        if values.len() != STAT_FEATURE_LEN {
            return Err(FeatureError::DimensionMismatch {
                expected: STAT_FEATURE_LEN,
                found: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// The final classifier input: transform projection followed by stats
/// projection, z-scored with training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFeature {
    pub values: Vec<f64>,
}

/// Concatenates [`preprocess_channel`] over the nine channels in their
/// fixed order.
pub fn assemble_transform_features(
    cs: &ChannelSet,
    mode: PreprocessMode,
    fb: &WaveletFilterBank,
) -> Result<TransformFeatureVector, FeatureError> {
    let mut values = Vec::with_capacity(TRANSFORM_FEATURE_LEN);
    for (_, channel) in cs.iter() {
        values.extend(preprocess_channel(channel, mode, fb)?);
    }
    TransformFeatureVector::new(values)
}

/// Concatenates [`channel_stats`] over the nine channels in their fixed
/// order.
pub fn assemble_stat_features(cs: &ChannelSet) -> Result<StatFeatureVector, FeatureError> {
    let mut values = Vec::with_capacity(STAT_FEATURE_LEN);
    for (_, channel) in cs.iter() {
        values.extend(channel_stats(channel)?);
    }
    StatFeatureVector::new(values)
}

/// Fitted PCA basis: column mean, top-k orthonormal directions (rows of
/// `loadings`), their eigenvalues in descending order, and the total
/// variance of the training data for explained-variance reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PCAModel {
    mean: Vec<f64>,
    loadings: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    total_variance: f64,
}

impl PCAModel {
    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn k(&self) -> usize {
        self.loadings.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn loadings(&self) -> &[Vec<f64>] {
        &self.loadings
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }
}

/// Fits PCA on `samples` (rows are observations) and retains the top `k`
/// directions.
///
/// The covariance uses the 1/(m-1) sample normalization. When the
/// dimension exceeds the sample count the eigenproblem is solved on the
/// m x m Gram matrix instead of the d x d covariance; both routes produce
/// the same retained spectrum and directions.
pub fn pca_fit(samples: &[Vec<f64>], k: usize) -> Result<PCAModel, FeatureError> {
    let m = samples.len();
    if m < 2 {
        return Err(FeatureError::TooFewSamples { found: m, min: 2 });
    }
    let d = samples[0].len();
    for row in samples {
        if row.len() != d {
            return Err(FeatureError::DimensionMismatch {
                expected: d,
                found: row.len(),
            });
        }
    }
    let limit = (m - 1).min(d);
    if k == 0 || k > limit {
        return Err(FeatureError::KTooLarge { k, limit });
    }

    let mut mean = vec![0.0; d];
    for row in samples {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= m as f64;
    }
    let centered: Vec<Vec<f64>> = samples
        .iter()
        .map(|row| row.iter().zip(&mean).map(|(v, mu)| v - mu).collect())
        .collect();

    let sum_sq: f64 = centered.iter().flatten().map(|v| v * v).sum();
    let raw_scale = samples
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if sum_sq <= 1e-20 * (1.0 + raw_scale * raw_scale) {
        return Err(FeatureError::DegenerateData);
    }
    let total_variance = sum_sq / (m - 1) as f64;

    let (mut eigenvalues, mut loadings) = if d <= m {
        covariance_eigen(&centered, d, m, k)
    } else {
        gram_eigen(&centered, d, m, k)
    };

    for v in &mut eigenvalues {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    for row in &mut loadings {
        fix_sign(row);
    }

    Ok(PCAModel {
        mean,
        loadings,
        eigenvalues,
        total_variance,
    })
}

/// Direct route: Jacobi eigendecomposition of the d x d covariance.
#[allow(clippy::needless_range_loop)] // triangular index loops
fn covariance_eigen(
    centered: &[Vec<f64>],
    d: usize,
    m: usize,
    k: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let norm = 1.0 / (m - 1) as f64;
    let mut cov = vec![vec![0.0; d]; d];
    for row in centered {
        for i in 0..d {
            for j in i..d {
                cov[i][j] += row[i] * row[j] * norm;
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            cov[i][j] = cov[j][i];
        }
    }
    let (values, vectors) = jacobi_eigen_symmetric(cov);
    let order = descending_order(&values);
    let eigenvalues: Vec<f64> = order.iter().take(k).map(|&i| values[i]).collect();
    let loadings: Vec<Vec<f64>> = order
        .iter()
        .take(k)
        .map(|&i| (0..d).map(|r| vectors[r][i]).collect())
        .collect();
    (eigenvalues, loadings)
}

/// Gram route for d > m: eigendecompose the m x m Gram matrix and map its
/// eigenvectors back through the data. Eigenpairs below numerical rank get
/// deterministic orthonormal completion directions with eigenvalue 0.
#[allow(clippy::needless_range_loop)] // triangular index loops
fn gram_eigen(centered: &[Vec<f64>], d: usize, m: usize, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let norm = 1.0 / (m - 1) as f64;
    let mut gram = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let dot: f64 = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum();
            gram[i][j] = dot * norm;
            gram[j][i] = gram[i][j];
        }
    }
    let (values, vectors) = jacobi_eigen_symmetric(gram);
    let order = descending_order(&values);
    let lambda_max = values[order[0]].max(0.0);

    let mut eigenvalues = Vec::with_capacity(k);
    let mut loadings: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let lambda = values[idx];
        if lambda > lambda_max * 1e-12 && lambda > 0.0 {
            // direction = X_c^T v / sqrt((m-1) lambda)
            let mut dir = vec![0.0; d];
            for (row, sample) in centered.iter().enumerate() {
                let w = vectors[row][idx];
                for (acc, v) in dir.iter_mut().zip(sample) {
                    *acc += w * v;
                }
            }
            let scale = 1.0 / ((m - 1) as f64 * lambda).sqrt();
            for v in &mut dir {
                *v *= scale;
            }
            eigenvalues.push(lambda);
            loadings.push(dir);
        } else {
            eigenvalues.push(0.0);
            loadings.push(complete_direction(&loadings, d));
        }
    }
    (eigenvalues, loadings)
}

/// First standard basis vector with a substantial component orthogonal to
/// the rows already chosen, Gram-Schmidt orthogonalized and normalized.
fn complete_direction(existing: &[Vec<f64>], d: usize) -> Vec<f64> {
    for axis in 0..d {
        let mut dir = vec![0.0; d];
        dir[axis] = 1.0;
        for row in existing {
            let dot: f64 = dir.iter().zip(row).map(|(a, b)| a * b).sum();
            for (v, r) in dir.iter_mut().zip(row) {
                *v -= dot * r;
            }
        }
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.5 {
            for v in &mut dir {
                *v /= norm;
            }
            return dir;
        }
    }
    unreachable!("fewer than d orthonormal rows must leave a free axis");
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    order
}

/// Makes the largest-magnitude entry of a direction positive (first such
/// index on ties), removing the eigenvector sign ambiguity.
fn fix_sign(row: &mut [f64]) {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if v.abs() > row[best].abs() {
            best = i;
        }
    }
    if row[best] < 0.0 {
        for v in row.iter_mut() {
            *v = -*v;
        }
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// (unsorted) eigenvalues and the eigenvector matrix with eigenvectors as
/// columns. Off-diagonal tolerance 1e-12 (relative), at most 100 sweeps.
#[allow(clippy::needless_range_loop)] // plane-rotation index pairs
fn jacobi_eigen_symmetric(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if n == 1 {
        return (vec![a[0][0]], v);
    }
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1.0);

    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a[p][q].abs();
            }
        }
        if off <= 1e-12 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta.abs() > 1e150 {
                    1.0 / (2.0 * theta)
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                let apq = a[p][q];
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i][p];
                        let aiq = a[i][q];
                        a[i][p] = aip - s * (aiq + tau * aip);
                        a[i][q] = aiq + s * (aip - tau * aiq);
                        a[p][i] = a[i][p];
                        a[q][i] = a[i][q];
                    }
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = vip - s * (viq + tau * vip);
                    row[q] = viq + s * (vip - tau * viq);
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i][i]).collect();
    (values, v)
}

/// Projects a vector onto the retained directions:
/// `b = loadings * (a - mean)`.
pub fn pca_project(model: &PCAModel, a: &[f64]) -> Result<Vec<f64>, FeatureError> {
    if a.len() != model.dimension() {
        return Err(FeatureError::DimensionMismatch {
            expected: model.dimension(),
            found: a.len(),
        });
    }
    let centered: Vec<f64> = a.iter().zip(&model.mean).map(|(v, mu)| v - mu).collect();
    Ok(model
        .loadings
        .iter()
        .map(|row| row.iter().zip(&centered).map(|(l, c)| l * c).sum())
        .collect())
}

/// Maps a projection back to the input space:
/// `a = mean + loadings^T * b`.
pub fn pca_reconstruct(model: &PCAModel, b: &[f64]) -> Result<Vec<f64>, FeatureError> {
    if b.len() != model.k() {
        return Err(FeatureError::DimensionMismatch {
            expected: model.k(),
            found: b.len(),
        });
    }
    let mut out = model.mean.clone();
    for (coeff, row) in b.iter().zip(&model.loadings) {
        for (acc, l) in out.iter_mut().zip(row) {
            *acc += coeff * l;
        }
    }
    Ok(out)
}

/// Per-component and cumulative explained-variance ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplainedVariance {
    pub ratios: Vec<f64>,
    pub cumulative: Vec<f64>,
}

/// Eigenvalue contribution of each retained component, as a fraction of
/// the total training variance, plus the running sum.
pub fn explained_variance(model: &PCAModel) -> ExplainedVariance {
    let total = model.total_variance;
    let ratios: Vec<f64> = model
        .eigenvalues
        .iter()
        .map(|&l| (l / total).clamp(0.0, 1.0))
        .collect();
    let mut cumulative = Vec::with_capacity(ratios.len());
    let mut acc = 0.0;
    for r in &ratios {
        acc = (acc + r).clamp(0.0, 1.0);
        cumulative.push(acc);
    }
    ExplainedVariance { ratios, cumulative }
}

/// The fitted reduction stage: a PCA model per feature view plus the
/// z-score statistics of the projected training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReducer {
    transform_pca: PCAModel,
    stats_pca: PCAModel,
    scale_mean: Vec<f64>,
    scale_sd: Vec<f64>,
}

impl FeatureReducer {
    /// Fits both PCA models on the training rows (one transform and one
    /// stats vector per sample, in the same order) and records the
    /// z-score statistics of the projected training set.
    pub fn fit(
        transform_rows: &[TransformFeatureVector],
        stat_rows: &[StatFeatureVector],
        transform_k: usize,
        stats_k: usize,
    ) -> Result<Self, FeatureError> {
        if transform_rows.len() != stat_rows.len() {
            return Err(FeatureError::DimensionMismatch {
                expected: transform_rows.len(),
                found: stat_rows.len(),
            });
        }
        let t_matrix: Vec<Vec<f64>> = transform_rows.iter().map(|r| r.values.clone()).collect();
        let s_matrix: Vec<Vec<f64>> = stat_rows.iter().map(|r| r.values.clone()).collect();
        let transform_pca = pca_fit(&t_matrix, transform_k)?;
        let stats_pca = pca_fit(&s_matrix, stats_k)?;

        let mut projected: Vec<Vec<f64>> = Vec::with_capacity(transform_rows.len());
        for (t, s) in t_matrix.iter().zip(&s_matrix) {
            let mut row = pca_project(&transform_pca, t)?;
            row.extend(pca_project(&stats_pca, s)?);
            projected.push(row);
        }
        let dim = transform_k + stats_k;
        let m = projected.len() as f64;
        let mut scale_mean = vec![0.0; dim];
        for row in &projected {
            for (acc, v) in scale_mean.iter_mut().zip(row) {
                *acc += v / m;
            }
        }
        let mut scale_sd = vec![0.0; dim];
        for row in &projected {
            for (acc, (v, mu)) in scale_sd.iter_mut().zip(row.iter().zip(&scale_mean)) {
                *acc += (v - mu) * (v - mu) / m;
            }
        }
        for sd in &mut scale_sd {
            *sd = sd.sqrt();
            if *sd <= 1e-12 {
                *sd = 0.0; // coordinate carried no training variance
            }
        }
        Ok(Self {
            transform_pca,
            stats_pca,
            scale_mean,
            scale_sd,
        })
    }

    /// Projects one sample through both PCA models and z-scores each
    /// coordinate with the training statistics. Coordinates that had no
    /// training variance map to 0.
    pub fn reduce(
        &self,
        transform: &TransformFeatureVector,
        stats: &StatFeatureVector,
    ) -> Result<ReducedFeature, FeatureError> {
        let mut values = pca_project(&self.transform_pca, transform.values())?;
        values.extend(pca_project(&self.stats_pca, stats.values())?);
        for (v, (mu, sd)) in values
            .iter_mut()
            .zip(self.scale_mean.iter().zip(&self.scale_sd))
        {
            *v = if *sd > 0.0 { (*v - mu) / sd } else { 0.0 };
        }
        Ok(ReducedFeature { values })
    }

    pub fn output_len(&self) -> usize {
        self.scale_mean.len()
    }

    pub fn transform_pca(&self) -> &PCAModel {
        &self.transform_pca
    }

    pub fn stats_pca(&self) -> &PCAModel {
        &self.stats_pca
    }
}
