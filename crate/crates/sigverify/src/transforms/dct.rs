//! Orthonormal discrete cosine transform (type II) and its inverse.
//!
//! Direct O(n^2) evaluation; pipeline inputs are at most 100 samples, so a
//! fast transform would buy nothing.

use super::wavelet::TransformError;

/// DCT-II coefficients, same length as the transformed signal. The
/// orthonormal scaling makes the transform energy-preserving (Parseval).
#[derive(Debug, Clone, PartialEq)]
pub struct DctCoeffs {
    pub values: Vec<f64>,
}

/// Orthonormal DCT-II:
/// `C[k] = s(k) * sum_n x[n] cos(pi (2n+1) k / (2N))`,
/// with `s(0) = sqrt(1/N)` and `s(k>0) = sqrt(2/N)`.
pub fn dct(signal: &[f64]) -> Result<DctCoeffs, TransformError> {
    let n = signal.len();
    if n == 0 {
        return Err(TransformError::EmptyInput);
    }
    let nf = n as f64;
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let s = if k == 0 {
            (1.0 / nf).sqrt()
        } else {
            (2.0 / nf).sqrt()
        };
        let mut acc = 0.0;
        for (i, &x) in signal.iter().enumerate() {
            acc += x * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos();
        }
        values.push(s * acc);
    }
    Ok(DctCoeffs { values })
}

/// Exact inverse of [`dct`] (orthonormal DCT-III).
pub fn idct(coeffs: &DctCoeffs) -> Result<Vec<f64>, TransformError> {
    let n = coeffs.values.len();
    if n == 0 {
        return Err(TransformError::EmptyInput);
    }
    let nf = n as f64;
    let mut signal = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = 0.0;
        for (k, &c) in coeffs.values.iter().enumerate() {
            let s = if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            };
            acc +=
                s * c * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos();
        }
        signal.push(acc);
    }
    Ok(signal)
}
