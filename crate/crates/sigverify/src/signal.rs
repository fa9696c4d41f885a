//! Sampled pen trajectories and the nine derived analysis channels.
//!
//! A [`RawSignature`] is the ordered sequence of tablet samples for one
//! signing act. [`derive_channels`] turns it into the fixed nine-channel
//! [`ChannelSet`] (position, pressure, pen orientation, first differences
//! and speed), each channel resampled to a common length and z-scored.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("signature has {found} point(s); at least 2 are required")]
    TooFewPoints { found: usize },
    #[error("timestamp decreases at point {index}")]
    NonMonotonicTime { index: usize },
    #[error("negative pressure at point {index}")]
    NegativePressure { index: usize },
    #[error("sequence of length {len} cannot be resampled to {requested} (both must be >= 2)")]
    LengthTooShort { len: usize, requested: usize },
    #[error("resample length {requested} is below the minimum of {min}")]
    ResampleBelowMinimum { requested: usize, min: usize },
    #[error("smoothing window {window} invalid for length {len} (must be odd and <= length)")]
    BadWindow { window: usize, len: usize },
}

/// One tablet sample: position, time, pressure and pen orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub x: f64,
    pub y: f64,
    /// Timestamp in milliseconds, non-decreasing within a signature.
    pub t: f64,
    /// Pen pressure, >= 0 (device units).
    pub pressure: f64,
    /// Pen azimuth angle (device units).
    pub azimuth: f64,
    /// Pen altitude/elevation angle (device units).
    pub altitude: f64,
    pub pen_down: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Genuine,
    Forgery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Svc2004,
    Csv,
    Synthetic,
}

/// A sampled signature plus its identity metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSignature {
    pub signer_id: String,
    /// 1-based sample number within the signer's files.
    pub sample_index: u32,
    pub label: Label,
    pub points: Vec<SamplePoint>,
    pub source: Source,
}

/// Checks the trajectory invariants and hands the signature back unchanged.
///
/// Fails on the first offending point: fewer than two samples, a timestamp
/// that goes backwards, or a negative pressure value.
pub fn validate(sig: RawSignature) -> Result<RawSignature, SignalError> {
    if sig.points.len() < 2 {
        return Err(SignalError::TooFewPoints {
            found: sig.points.len(),
        });
    }
    for i in 1..sig.points.len() {
        if sig.points[i].t < sig.points[i - 1].t {
            return Err(SignalError::NonMonotonicTime { index: i });
        }
    }
    for (i, p) in sig.points.iter().enumerate() {
        if p.pressure < 0.0 {
            return Err(SignalError::NegativePressure { index: i });
        }
    }
    Ok(sig)
}

/// The nine analysis channels, in the fixed order used throughout the
/// feature pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    X,
    Y,
    Pressure,
    Azimuth,
    Altitude,
    Dx,
    Dy,
    Dpressure,
    Speed,
}

impl Channel {
    pub const ALL: [Channel; 9] = [
        Channel::X,
        Channel::Y,
        Channel::Pressure,
        Channel::Azimuth,
        Channel::Altitude,
        Channel::Dx,
        Channel::Dy,
        Channel::Dpressure,
        Channel::Speed,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&c| c == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Pressure => "pressure",
            Channel::Azimuth => "azimuth",
            Channel::Altitude => "altitude",
            Channel::Dx => "dx",
            Channel::Dy => "dy",
            Channel::Dpressure => "dpressure",
            Channel::Speed => "speed",
        }
    }
}

/// Nine equal-length real sequences derived from one signature.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    data: [Vec<f64>; 9],
}

impl ChannelSet {
    /// Wraps nine channels; panics if their lengths differ (programming
    /// error, not input error — all construction paths resample first).
    pub fn new(data: [Vec<f64>; 9]) -> Self {
        let n = data[0].len();
        assert!(
            data.iter().all(|c| c.len() == n),
            "channel lengths must all be equal"
        );
        Self { data }
    }

    pub fn get(&self, c: Channel) -> &[f64] {
        &self.data[c.index()]
    }

    /// Channels in the fixed [`Channel::ALL`] order.
    pub fn iter(&self) -> impl Iterator<Item = (Channel, &[f64])> {
        Channel::ALL.iter().map(move |&c| (c, self.get(c)))
    }

    /// Common length of every channel.
    pub fn len(&self) -> usize {
        self.data[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Minimum resample length accepted by [`derive_channels`]; the db4 filters
/// downstream need at least 8 samples.
pub const MIN_RESAMPLE_LEN: usize = 8;

/// Derives the nine-channel set: raw x/y/pressure/azimuth/altitude, their
/// first differences (last value repeated) and point speed, each resampled
/// to `n_resample` samples and z-score normalized.
pub fn derive_channels(sig: &RawSignature, n_resample: usize) -> Result<ChannelSet, SignalError> {
    derive_channels_with(sig, n_resample, None)
}

/// [`derive_channels`] with optional moving-average smoothing (odd window)
/// applied to the five raw channels before differencing.
pub fn derive_channels_with(
    sig: &RawSignature,
    n_resample: usize,
    smooth_window: Option<usize>,
) -> Result<ChannelSet, SignalError> {
    validate(sig.clone())?;
    if n_resample < MIN_RESAMPLE_LEN {
        return Err(SignalError::ResampleBelowMinimum {
            requested: n_resample,
            min: MIN_RESAMPLE_LEN,
        });
    }

    let mut x: Vec<f64> = sig.points.iter().map(|p| p.x).collect();
    let mut y: Vec<f64> = sig.points.iter().map(|p| p.y).collect();
    let mut pressure: Vec<f64> = sig.points.iter().map(|p| p.pressure).collect();
    let mut azimuth: Vec<f64> = sig.points.iter().map(|p| p.azimuth).collect();
    let mut altitude: Vec<f64> = sig.points.iter().map(|p| p.altitude).collect();

    if let Some(w) = smooth_window {
        for c in [&mut x, &mut y, &mut pressure, &mut azimuth, &mut altitude] {
            *c = smooth(c, w)?;
        }
    }

    let dx = forward_diff(&x);
    let dy = forward_diff(&y);
    let dpressure = forward_diff(&pressure);
    let speed: Vec<f64> = dx
        .iter()
        .zip(&dy)
        .map(|(a, b)| (a * a + b * b).sqrt())
        .collect();

    let channels = [x, y, pressure, azimuth, altitude, dx, dy, dpressure, speed];
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(9);
    for c in &channels {
        out.push(normalize_z(&resample(c, n_resample)?));
    }
    Ok(ChannelSet::new(out.try_into().unwrap()))
}

/// First difference with the last value repeated, so the output keeps the
/// input length.
fn forward_diff(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut d: Vec<f64> = (0..n - 1).map(|i| v[i + 1] - v[i]).collect();
    d.push(*d.last().unwrap());
    d
}

/// Linear interpolation at `n` uniformly spaced positions over
/// `[0, len - 1]`; endpoints are preserved exactly.
pub fn resample(channel: &[f64], n: usize) -> Result<Vec<f64>, SignalError> {
    if channel.len() < 2 || n < 2 {
        return Err(SignalError::LengthTooShort {
            len: channel.len(),
            requested: n,
        });
    }
    let last = channel.len() - 1;
    let step = last as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n);
    out.push(channel[0]);
    for j in 1..n - 1 {
        let pos = j as f64 * step;
        let i = (pos.floor() as usize).min(last - 1);
        let frac = pos - i as f64;
        out.push(channel[i] + frac * (channel[i + 1] - channel[i]));
    }
    out.push(channel[last]);
    Ok(out)
}

const ZERO_VARIANCE_EPS: f64 = 1e-12;

/// Z-score normalization with population standard deviation. Sequences
/// whose deviation is below `1e-12` map to all zeros instead of erroring,
/// since a held-constant channel (e.g. pressure) is legitimate input.
pub fn normalize_z(channel: &[f64]) -> Vec<f64> {
    if channel.is_empty() {
        return Vec::new();
    }
    let n = channel.len() as f64;
    let mean = channel.iter().sum::<f64>() / n;
    let var = channel.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd > ZERO_VARIANCE_EPS {
        channel.iter().map(|v| (v - mean) / sd).collect()
    } else {
        vec![0.0; channel.len()]
    }
}

/// Centered moving average with half-point symmetric edge extension. The
/// window must be odd and no longer than the input.
pub fn smooth(channel: &[f64], window: usize) -> Result<Vec<f64>, SignalError> {
    let n = channel.len();
    if window == 0 || window.is_multiple_of(2) || window > n {
        return Err(SignalError::BadWindow { window, len: n });
    }
    let half = (window / 2) as isize;
    let at = |i: isize| -> f64 {
        let idx = if i < 0 {
            (-i - 1) as usize
        } else if i >= n as isize {
            2 * n - 1 - i as usize
        } else {
            i as usize
        };
        channel[idx]
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n as isize {
        let sum: f64 = (i - half..=i + half).map(at).sum();
        out.push(sum / window as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point(x: f64, y: f64, t: f64, pressure: f64) -> SamplePoint {
        SamplePoint {
            x,
            y,
            t,
            pressure,
            azimuth: 0.0,
            altitude: 0.0,
            pen_down: true,
        }
    }

    fn sig_from_points(points: Vec<SamplePoint>) -> RawSignature {
        RawSignature {
            signer_id: "t".into(),
            sample_index: 1,
            label: Label::Genuine,
            points,
            source: Source::Synthetic,
        }
    }

    #[test]
    fn validate_minimal_two_point_signature() {
        let sig = sig_from_points(vec![point(0.0, 0.0, 0.0, 1.0), point(1.0, 1.0, 10.0, 1.0)]);
        let back = validate(sig.clone()).unwrap();
        assert_eq!(back, sig);
    }

    #[test]
    fn validate_rejects_nonmonotonic_time() {
        let sig = sig_from_points(vec![
            point(0.0, 0.0, 0.0, 1.0),
            point(1.0, 0.0, 10.0, 1.0),
            point(2.0, 0.0, 5.0, 1.0),
        ]);
        assert_eq!(
            validate(sig).unwrap_err(),
            SignalError::NonMonotonicTime { index: 2 }
        );
    }

    #[test]
    fn validate_rejects_negative_pressure() {
        let sig = sig_from_points(vec![point(0.0, 0.0, 0.0, 1.0), point(1.0, 0.0, 10.0, -3.0)]);
        assert_eq!(
            validate(sig).unwrap_err(),
            SignalError::NegativePressure { index: 1 }
        );
    }

    #[test]
    fn validate_rejects_single_point() {
        let sig = sig_from_points(vec![point(0.0, 0.0, 0.0, 1.0)]);
        assert_eq!(
            validate(sig).unwrap_err(),
            SignalError::TooFewPoints { found: 1 }
        );
    }

    #[test]
    fn resample_hand_checked_ramp() {
        let out = resample(&[0.0, 1.0, 2.0, 3.0, 4.0], 9).unwrap();
        let expected = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0];
        for (a, b) in out.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-12, "{out:?}");
        }
    }

    #[test]
    fn resample_constant_preserved() {
        let out = resample(&[5.0, 5.0, 5.0], 100).unwrap();
        assert_eq!(out.len(), 100);
        assert!(out.iter().all(|&v| v == 5.0));
    }

    #[test]
    fn resample_identity_on_endpoints() {
        let out = resample(&[3.25, -7.5], 2).unwrap();
        assert_eq!(out, vec![3.25, -7.5]);
    }

    #[test]
    fn resample_rejects_short_inputs() {
        assert!(resample(&[1.0], 10).is_err());
        assert!(resample(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn normalize_z_hand_checked() {
        let out = normalize_z(&[1.0, 2.0, 3.0]);
        let r = (3.0f64 / 2.0).sqrt();
        assert!((out[0] + r).abs() < 1e-12);
        assert!(out[1].abs() < 1e-12);
        assert!((out[2] - r).abs() < 1e-12);
    }

    #[test]
    fn normalize_z_zero_variance_maps_to_zeros() {
        assert_eq!(normalize_z(&[7.0, 7.0, 7.0, 7.0]), vec![0.0; 4]);
    }

    #[test]
    fn normalize_z_idempotent() {
        let once = normalize_z(&[4.0, -1.0, 0.5, 9.0, 2.0]);
        let twice = normalize_z(&once);
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_window_one_is_identity() {
        let v = vec![1.0, -2.0, 3.5];
        assert_eq!(smooth(&v, 1).unwrap(), v);
    }

    #[test]
    fn smooth_constant_unchanged() {
        let v = vec![2.5; 9];
        assert_eq!(smooth(&v, 5).unwrap(), v);
        assert_eq!(smooth(&v, 9).unwrap(), v);
    }

    #[test]
    fn smooth_hand_checked_impulse() {
        let out = smooth(&[0.0, 0.0, 3.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(out, vec![0.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn smooth_rejects_bad_windows() {
        assert!(smooth(&[1.0, 2.0, 3.0], 2).is_err());
        assert!(smooth(&[1.0, 2.0, 3.0], 5).is_err());
        assert!(smooth(&[1.0, 2.0, 3.0], 0).is_err());
    }

    fn straight_line_signature(n: usize) -> RawSignature {
        let points = (0..n)
            .map(|i| point(i as f64, 0.0, 10.0 * i as f64, 1.0))
            .collect();
        sig_from_points(points)
    }

    #[test]
    fn derive_channels_straight_line() {
        // x = t, y = 0: before resampling DX is constant, DY zero and
        // SPEED equals |DX|. After z-scoring the constant channels all
        // collapse to zeros, so they must be identical.
        let sig = straight_line_signature(11);
        let cs = derive_channels(&sig, 100).unwrap();
        assert!(cs.get(Channel::Dx).iter().all(|&v| v == 0.0));
        assert!(cs.get(Channel::Dy).iter().all(|&v| v == 0.0));
        assert!(cs.get(Channel::Speed).iter().all(|&v| v == 0.0));
        // X itself ramps, so it survives z-scoring with unit deviation.
        let x = cs.get(Channel::X);
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn derive_channels_constant_position() {
        let points = (0..10).map(|i| point(4.0, 2.0, i as f64, 3.0)).collect();
        let cs = derive_channels(&sig_from_points(points), 100).unwrap();
        for c in [
            Channel::Dx,
            Channel::Dy,
            Channel::Speed,
            Channel::X,
            Channel::Y,
        ] {
            assert!(cs.get(c).iter().all(|&v| v == 0.0), "{c:?}");
        }
    }

    #[test]
    fn derive_channels_lengths_and_determinism() {
        let sig = straight_line_signature(37);
        let a = derive_channels(&sig, 100).unwrap();
        let b = derive_channels(&sig, 100).unwrap();
        assert_eq!(a.len(), 100);
        for (c, chan) in a.iter() {
            assert_eq!(chan.len(), 100, "{c:?}");
        }
        assert_eq!(a, b);
    }

    #[test]
    fn derive_channels_rejects_tiny_resample() {
        let sig = straight_line_signature(11);
        assert!(matches!(
            derive_channels(&sig, 4),
            Err(SignalError::ResampleBelowMinimum { .. })
        ));
    }

    proptest! {
        #[test]
        fn resample_exact_on_affine(a in -10.0f64..10.0, b in -10.0f64..10.0,
                                    len in 2usize..50, n in 2usize..200) {
            let src: Vec<f64> = (0..len).map(|i| a + b * i as f64).collect();
            let out = resample(&src, n).unwrap();
            let step = (len - 1) as f64 / (n - 1) as f64;
            for (j, v) in out.iter().enumerate() {
                let expect = a + b * (j as f64 * step);
                prop_assert!((v - expect).abs() < 1e-12 * (1.0 + expect.abs()));
            }
        }

        #[test]
        fn normalize_z_moments(v in proptest::collection::vec(-100.0f64..100.0, 3..64)) {
            let out = normalize_z(&v);
            let n = out.len() as f64;
            let mean = out.iter().sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-12);
            let sd = (out.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
            // Either the input was (numerically) constant or sigma is 1.
            prop_assert!(sd.abs() < 1e-12 || (sd - 1.0).abs() < 1e-12);
        }
    }
}
