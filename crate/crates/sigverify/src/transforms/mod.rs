//! Signal preprocessing transforms: db4 wavelet analysis, orthonormal DCT,
//! and the per-channel preprocessing step that feeds feature extraction.

mod dct;
mod wavelet;

pub use dct::{dct, idct, DctCoeffs};
pub use wavelet::{
    coeff_len, dwt_single, idwt_single, make_db4, max_levels, wavedec, TransformError,
    WaveletCoeffs, WaveletFilterBank,
};

use serde::{Deserialize, Serialize};

/// Common length every channel is resampled to before preprocessing.
pub const CHANNEL_LEN: usize = 100;

/// Coefficients kept per channel: one db4 level of a 100-sample channel
/// yields `floor((100 + 8 - 1) / 2) = 53` approximation coefficients, and
/// the DCT modes are truncated to match.
pub const COEFFS_PER_CHANNEL: usize = 53;

/// Which transform produces the 53 per-channel coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreprocessMode {
    /// db4 approximation coefficients.
    Dwt,
    /// Leading orthonormal DCT coefficients.
    Dct,
    /// DCT of the db4 approximation coefficients.
    DwtDct,
}

impl PreprocessMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PreprocessMode::Dwt => "dwt",
            PreprocessMode::Dct => "dct",
            PreprocessMode::DwtDct => "dwt-dct",
        }
    }
}

impl std::fmt::Display for PreprocessMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PreprocessMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dwt" => Ok(PreprocessMode::Dwt),
            "dct" => Ok(PreprocessMode::Dct),
            "dwt-dct" | "dwt_dct" | "dwtdct" => Ok(PreprocessMode::DwtDct),
            other => Err(format!(
                "unknown preprocessing mode '{other}' (expected dwt, dct or dwt-dct)"
            )),
        }
    }
}

/// Reduces one 100-sample channel to its 53 transform coefficients.
///
/// All three modes emit exactly [`COEFFS_PER_CHANNEL`] values so downstream
/// feature dimensions do not depend on the mode.
pub fn preprocess_channel(
    channel: &[f64],
    mode: PreprocessMode,
    fb: &WaveletFilterBank,
) -> Result<Vec<f64>, TransformError> {
    if channel.len() != CHANNEL_LEN {
        return Err(TransformError::BadLength {
            expected: CHANNEL_LEN,
            found: channel.len(),
        });
    }
    match mode {
        PreprocessMode::Dwt => {
            let (approx, _) = dwt_single(channel, fb)?;
            Ok(approx)
        }
        PreprocessMode::Dct => {
            let coeffs = dct(channel)?;
            Ok(coeffs.values[..COEFFS_PER_CHANNEL].to_vec())
        }
        PreprocessMode::DwtDct => {
            let (approx, _) = dwt_single(channel, fb)?;
            Ok(dct(&approx)?.values)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn every_mode_emits_53_values() {
        let fb = make_db4();
        let mut rng = SplitMix64::new(8);
        let channel: Vec<f64> = (0..CHANNEL_LEN).map(|_| rng.range_f64(-2.0, 2.0)).collect();
        for mode in [
            PreprocessMode::Dwt,
            PreprocessMode::Dct,
            PreprocessMode::DwtDct,
        ] {
            let out = preprocess_channel(&channel, mode, &fb).unwrap();
            assert_eq!(out.len(), COEFFS_PER_CHANNEL, "{mode}");
        }
    }

    #[test]
    fn constant_channel_dwt_mode() {
        let fb = make_db4();
        let c = -1.25;
        let out = preprocess_channel(&vec![c; CHANNEL_LEN], PreprocessMode::Dwt, &fb).unwrap();
        for v in &out {
            assert!((v - c * std::f64::consts::SQRT_2).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_channel_dwt_dct_mode_is_single_spike() {
        let fb = make_db4();
        let out = preprocess_channel(&vec![2.0; CHANNEL_LEN], PreprocessMode::DwtDct, &fb).unwrap();
        assert!(out[0].abs() > 1.0);
        for v in &out[1..] {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn wrong_length_rejected() {
        let fb = make_db4();
        assert_eq!(
            preprocess_channel(&[0.0; 99], PreprocessMode::Dwt, &fb).unwrap_err(),
            TransformError::BadLength {
                expected: 100,
                found: 99
            }
        );
    }

    #[test]
    fn mode_parsing_roundtrip() {
        for mode in [
            PreprocessMode::Dwt,
            PreprocessMode::Dct,
            PreprocessMode::DwtDct,
        ] {
            assert_eq!(mode.as_str().parse::<PreprocessMode>().unwrap(), mode);
        }
        assert!("fft".parse::<PreprocessMode>().is_err());
    }
}
