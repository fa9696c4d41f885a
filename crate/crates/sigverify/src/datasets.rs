//! On-disk corpora: the SVC2004 text format, a generic signature CSV, a
//! deterministic synthetic corpus for desk-scale evaluation, and seeded
//! train/test splits.
//!
//! Directory layouts:
//! - SVC2004: flat files named `U<user>S<sample>.TXT` (case-insensitive);
//!   sample indices at or below the genuine cutoff are genuine, the rest
//!   skilled forgeries.
//! - CSV / synthetic: `<root>/<signer>/<genuine|forgery>/<idx>.csv` with a
//!   `x,y,pressure,azimuth,altitude,t` header per file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{fnv1a, SplitMix64};
use crate::signal::{validate, Label, RawSignature, SamplePoint, SignalError, Source};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: header declares {declared} points but the file has {found} data line(s)")]
    HeaderMismatch {
        path: String,
        declared: usize,
        found: usize,
    },
    #[error("{path}:{line}: expected 4 or 7 columns, found {found}")]
    BadColumnCount {
        path: String,
        line: usize,
        found: usize,
    },
    #[error("{path}:{line}: field '{field}' is not numeric")]
    NonNumericField {
        path: String,
        line: usize,
        field: String,
    },
    #[error("{path}: {detail}")]
    BadHeader { path: String, detail: String },
    #[error("{path}: {source}")]
    InvalidSignature {
        path: String,
        #[source]
        source: SignalError,
    },
    #[error("no parseable signer found under {root}")]
    EmptyDataset { root: String },
    #[error("cannot take {requested} training {what} sample(s) from {available} (test needs at least one)")]
    NotEnoughSamples {
        requested: usize,
        available: usize,
        what: &'static str,
    },
    #[error("invalid synthesis parameters: {detail}")]
    BadParams { detail: String },
}

fn io_err(path: &Path, source: std::io::Error) -> DatasetError {
    DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// One enrolled signer's samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SignerRecord {
    pub signer_id: String,
    pub genuine: Vec<RawSignature>,
    pub forgeries: Vec<RawSignature>,
}

/// A parsed corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetDescriptor {
    pub root: PathBuf,
    pub format: Source,
    pub signers: Vec<SignerRecord>,
}

/// Non-fatal problem noticed while scanning a directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanWarning {
    pub path: String,
    pub message: String,
}

/// Default genuine/forgery cutoff for SVC2004-style file numbering.
pub const SVC2004_GENUINE_PER_USER: u32 = 20;

/// Uniform spacing substituted when a file carries constant timestamps.
const SYNTH_TIMESTAMP_STEP_MS: f64 = 10.0;

// ---------------------------------------------------------------------------
// SVC2004 text format
// ---------------------------------------------------------------------------

/// Parses one SVC2004 trajectory file.
///
/// Line 1 is the point count; each following line has either 7 columns
/// `x y t button azimuth altitude pressure` or 4 columns `x y t button`
/// (missing channels zero-filled). `button > 0` means pen down. Signer id
/// and sample index are lifted from a `U<user>S<sample>` file name when
/// present; the label defaults to genuine and is reassigned by directory
/// scans.
pub fn parse_svc2004_file(path: &Path) -> Result<RawSignature, DatasetError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let display = path.display().to_string();
    let mut lines = text.lines();

    let header = lines.next().unwrap_or("").trim();
    let declared: usize = header.parse().map_err(|_| DatasetError::NonNumericField {
        path: display.clone(),
        line: 1,
        field: header.to_string(),
    })?;

    let mut points = Vec::with_capacity(declared);
    let mut data_lines = 0usize;
    for (offset, raw) in lines.enumerate() {
        let line_no = offset + 2;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        data_lines += 1;
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 7 && fields.len() != 4 {
            return Err(DatasetError::BadColumnCount {
                path: display.clone(),
                line: line_no,
                found: fields.len(),
            });
        }
        let mut parsed = [0.0f64; 7];
        for (idx, field) in fields.iter().enumerate() {
            parsed[idx] = field.parse().map_err(|_| DatasetError::NonNumericField {
                path: display.clone(),
                line: line_no,
                field: (*field).to_string(),
            })?;
        }
        let [x, y, t, button, azimuth, altitude, pressure] = parsed;
        points.push(SamplePoint {
            x,
            y,
            t,
            pressure,
            azimuth,
            altitude,
            pen_down: button > 0.0,
        });
    }
    if data_lines != declared {
        return Err(DatasetError::HeaderMismatch {
            path: display,
            declared,
            found: data_lines,
        });
    }

    synthesize_constant_timestamps(&mut points);
    let (signer_id, sample_index) = identity_from_filename(path);
    let sig = RawSignature {
        signer_id,
        sample_index,
        label: Label::Genuine,
        points,
        source: Source::Svc2004,
    };
    validate(sig).map_err(|source| DatasetError::InvalidSignature {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a signature back out in the SVC2004 7-column layout.
pub fn write_svc2004_file(sig: &RawSignature, path: &Path) -> Result<(), DatasetError> {
    let mut text = String::new();
    let _ = writeln!(text, "{}", sig.points.len());
    for p in &sig.points {
        let button = if p.pen_down { 1 } else { 0 };
        let _ = writeln!(
            text,
            "{} {} {} {} {} {} {}",
            p.x, p.y, p.t, button, p.azimuth, p.altitude, p.pressure
        );
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// `U<user>S<sample>` file stems carry the identity; anything else keeps
/// the stem as signer id with sample index 1.
fn identity_from_filename(path: &Path) -> (String, u32) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    if let Some((user, sample)) = parse_svc2004_stem(&stem) {
        (format!("U{user}"), sample)
    } else {
        (stem, 1)
    }
}

/// `U<digits>S<digits>`, case-insensitive.
fn parse_svc2004_stem(stem: &str) -> Option<(u32, u32)> {
    let rest = stem.strip_prefix(['U', 'u'])?;
    let split = rest.find(['S', 's'])?;
    let user: u32 = rest[..split].parse().ok()?;
    let sample: u32 = rest[split + 1..].parse().ok()?;
    Some((user, sample))
}

/// Constant (or absent) timing carries no information; substitute a
/// uniform 10 ms grid so derivative channels stay meaningful.
fn synthesize_constant_timestamps(points: &mut [SamplePoint]) {
    if points.len() < 2 {
        return;
    }
    let first = points[0].t;
    if points.iter().all(|p| p.t == first) {
        for (i, p) in points.iter_mut().enumerate() {
            p.t = i as f64 * SYNTH_TIMESTAMP_STEP_MS;
        }
    }
}

/// Scans a flat directory of `U<user>S<sample>.TXT` files. Samples with
/// index at or below `genuine_per_user` are genuine, the rest forgeries.
/// Unparseable or non-matching files are reported as warnings; the scan
/// fails only when no valid signer remains.
pub fn scan_svc2004_dir(
    root: &Path,
    genuine_per_user: u32,
) -> Result<(DatasetDescriptor, Vec<ScanWarning>), DatasetError> {
    let mut warnings = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| io_err(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();

    let mut signers: Vec<(u32, SignerRecord)> = Vec::new();
    for path in entries {
        let is_txt = path
            .extension()
            .map(|e| e.to_string_lossy().eq_ignore_ascii_case("txt"))
            .unwrap_or(false);
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        let Some((user, sample)) = parse_svc2004_stem(&stem).filter(|_| is_txt) else {
            warnings.push(ScanWarning {
                path: path.display().to_string(),
                message: "file name does not match U<user>S<sample>.TXT; ignored".into(),
            });
            continue;
        };
        match parse_svc2004_file(&path) {
            Ok(mut sig) => {
                sig.label = if sample <= genuine_per_user {
                    Label::Genuine
                } else {
                    Label::Forgery
                };
                let record = match signers.iter_mut().find(|(u, _)| *u == user) {
                    Some((_, record)) => record,
                    None => {
                        signers.push((
                            user,
                            SignerRecord {
                                signer_id: format!("U{user}"),
                                genuine: Vec::new(),
                                forgeries: Vec::new(),
                            },
                        ));
                        &mut signers.last_mut().unwrap().1
                    }
                };
                match sig.label {
                    Label::Genuine => record.genuine.push(sig),
                    Label::Forgery => record.forgeries.push(sig),
                }
            }
            Err(err) => warnings.push(ScanWarning {
                path: path.display().to_string(),
                message: err.to_string(),
            }),
        }
    }

    signers.sort_by_key(|(user, _)| *user);
    let mut records = Vec::new();
    for (_, record) in signers {
        if record.genuine.is_empty() {
            warnings.push(ScanWarning {
                path: record.signer_id.clone(),
                message: "signer has no genuine samples; skipped".into(),
            });
            continue;
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(DatasetError::EmptyDataset {
            root: root.display().to_string(),
        });
    }
    Ok((
        DatasetDescriptor {
            root: root.to_path_buf(),
            format: Source::Svc2004,
            signers: records,
        },
        warnings,
    ))
}

// ---------------------------------------------------------------------------
// Generic CSV format
// ---------------------------------------------------------------------------

const CSV_HEADER: &str = "x,y,pressure,azimuth,altitude,t";

/// Parses the generic signature CSV: a header line naming the columns
/// (`x` and `y` required; `pressure`, `azimuth`, `altitude`, `t` optional
/// and zero-filled / time-synthesized when absent), then one row per
/// sample point. `pen_down` is derived as `pressure > 0`.
pub fn parse_csv_file(path: &Path) -> Result<RawSignature, DatasetError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let display = path.display().to_string();
    let mut lines = text.lines();

    let header = lines.next().unwrap_or("").trim();
    let columns: Vec<String> = header
        .split(',')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    let find = |name: &str| columns.iter().position(|c| c == name);
    let (Some(x_col), Some(y_col)) = (find("x"), find("y")) else {
        return Err(DatasetError::BadHeader {
            path: display,
            detail: format!("header '{header}' must name at least the x and y columns"),
        });
    };
    let pressure_col = find("pressure");
    let azimuth_col = find("azimuth");
    let altitude_col = find("altitude");
    let t_col = find("t");

    let mut points = Vec::new();
    for (offset, raw) in lines.enumerate() {
        let line_no = offset + 2;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(DatasetError::BadColumnCount {
                path: display.clone(),
                line: line_no,
                found: fields.len(),
            });
        }
        let get = |col: Option<usize>| -> Result<f64, DatasetError> {
            match col {
                None => Ok(0.0),
                Some(idx) => fields[idx]
                    .parse()
                    .map_err(|_| DatasetError::NonNumericField {
                        path: display.clone(),
                        line: line_no,
                        field: fields[idx].to_string(),
                    }),
            }
        };
        let pressure = get(pressure_col)?;
        points.push(SamplePoint {
            x: get(Some(x_col))?,
            y: get(Some(y_col))?,
            t: get(t_col)?,
            pressure,
            azimuth: get(azimuth_col)?,
            altitude: get(altitude_col)?,
            pen_down: pressure > 0.0,
        });
    }
    if t_col.is_none() {
        for (i, p) in points.iter_mut().enumerate() {
            p.t = i as f64 * SYNTH_TIMESTAMP_STEP_MS;
        }
    } else {
        synthesize_constant_timestamps(&mut points);
    }

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    let sample_index = stem.parse().unwrap_or(1);
    let sig = RawSignature {
        signer_id: stem,
        sample_index,
        label: Label::Genuine,
        points,
        source: Source::Csv,
    };
    validate(sig).map_err(|source| DatasetError::InvalidSignature {
        path: path.display().to_string(),
        source,
    })
}

/// Serializes a signature in the generic CSV layout. Floats use the
/// shortest round-trip representation, so parse-write-parse is exact.
pub fn signature_to_csv(sig: &RawSignature) -> String {
    let mut text = String::with_capacity(sig.points.len() * 32);
    text.push_str(CSV_HEADER);
    text.push('\n');
    for p in &sig.points {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            p.x, p.y, p.pressure, p.azimuth, p.altitude, p.t
        );
    }
    text
}

pub fn write_csv_file(sig: &RawSignature, path: &Path) -> Result<(), DatasetError> {
    fs::write(path, signature_to_csv(sig)).map_err(|e| io_err(path, e))
}

/// Scans the `<root>/<signer>/<genuine|forgery>/<idx>.csv` layout used by
/// synthetic corpora and converted datasets.
pub fn scan_csv_dir(
    root: &Path,
    source: Source,
) -> Result<(DatasetDescriptor, Vec<ScanWarning>), DatasetError> {
    let mut warnings = Vec::new();
    let mut signer_dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| io_err(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    signer_dirs.sort();

    let mut records = Vec::new();
    for dir in signer_dirs {
        let signer_id = dir
            .file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        let mut record = SignerRecord {
            signer_id: signer_id.clone(),
            genuine: Vec::new(),
            forgeries: Vec::new(),
        };
        for (subdir, label) in [("genuine", Label::Genuine), ("forgery", Label::Forgery)] {
            let sub = dir.join(subdir);
            if !sub.is_dir() {
                continue;
            }
            let mut files: Vec<PathBuf> = fs::read_dir(&sub)
                .map_err(|e| io_err(&sub, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.extension()
                        .map(|e| e.to_string_lossy().eq_ignore_ascii_case("csv"))
                        .unwrap_or(false)
                })
                .collect();
            files.sort();
            for path in files {
                match parse_csv_file(&path) {
                    Ok(mut sig) => {
                        sig.signer_id = signer_id.clone();
                        sig.label = label;
                        sig.source = source;
                        match label {
                            Label::Genuine => record.genuine.push(sig),
                            Label::Forgery => record.forgeries.push(sig),
                        }
                    }
                    Err(err) => warnings.push(ScanWarning {
                        path: path.display().to_string(),
                        message: err.to_string(),
                    }),
                }
            }
        }
        if record.genuine.is_empty() {
            warnings.push(ScanWarning {
                path: dir.display().to_string(),
                message: "signer has no genuine samples; skipped".into(),
            });
            continue;
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(DatasetError::EmptyDataset {
            root: root.display().to_string(),
        });
    }
    Ok((
        DatasetDescriptor {
            root: root.to_path_buf(),
            format: source,
            signers: records,
        },
        warnings,
    ))
}

// ---------------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------------

/// Synthetic corpus parameters. Generation is a pure function of these
/// values: every drawn number comes from a splitmix stream keyed by
/// `(seed, signer, kind, sample)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub seed: u64,
    pub n_signers: usize,
    pub n_genuine: usize,
    pub n_forgery: usize,
    pub n_points: usize,
    /// Forgery distortion strength in `[0, 1]`: 0 makes forgeries
    /// indistinguishable from genuine jitter, 1 makes them grossly
    /// different.
    pub distortion: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: 42,
            n_signers: 10,
            n_genuine: 20,
            n_forgery: 20,
            n_points: 200,
            distortion: 0.3,
        }
    }
}

impl SynthParams {
    fn validate(&self) -> Result<(), DatasetError> {
        if self.n_signers < 1 || self.n_genuine < 1 || self.n_forgery < 1 {
            return Err(DatasetError::BadParams {
                detail: "signer and sample counts must be at least 1".into(),
            });
        }
        if self.n_points < 16 {
            return Err(DatasetError::BadParams {
                detail: format!("n_points = {} is below the minimum of 16", self.n_points),
            });
        }
        if !(0.0..=1.0).contains(&self.distortion) {
            return Err(DatasetError::BadParams {
                detail: format!("distortion = {} is outside [0, 1]", self.distortion),
            });
        }
        Ok(())
    }
}

/// Per-signer trajectory template: three harmonics per axis, a bell
/// pressure envelope and slow orientation drifts.
struct SignerTemplate {
    x_amp: [f64; 3],
    x_freq: [f64; 3],
    x_phase: [f64; 3],
    y_amp: [f64; 3],
    y_freq: [f64; 3],
    y_phase: [f64; 3],
    pressure_peak: f64,
    azimuth_base: f64,
    azimuth_drift: f64,
    altitude_base: f64,
    altitude_drift: f64,
}

const KIND_TEMPLATE: u64 = 0;
const KIND_GENUINE: u64 = 1;
const KIND_FORGERY: u64 = 2;

/// Relative amplitude/phase jitter between a signer's own samples.
const GENUINE_JITTER: f64 = 0.05;
/// Forgery amplitude perturbation per unit distortion.
const FORGERY_AMP_SCALE: f64 = 0.6;
/// Forgery phase perturbation (radians) per unit distortion.
const FORGERY_PHASE_SCALE: f64 = std::f64::consts::FRAC_PI_4;
/// Forgery time-warp depth per unit distortion.
const FORGERY_WARP_SCALE: f64 = 0.35;

impl SignerTemplate {
    fn draw(seed: u64, signer: u64) -> Self {
        let mut rng = SplitMix64::keyed(seed, &[signer, KIND_TEMPLATE, 0]);
        let mut harmonics = |base_amp: f64| -> ([f64; 3], [f64; 3], [f64; 3]) {
            let mut amp = [0.0; 3];
            let mut freq = [0.0; 3];
            let mut phase = [0.0; 3];
            for h in 0..3 {
                amp[h] = base_amp / (h + 1) as f64 * rng.range_f64(0.6, 1.4);
                freq[h] = (h + 1) as f64 + rng.range_f64(-0.25, 0.25);
                phase[h] = rng.range_f64(0.0, std::f64::consts::TAU);
            }
            (amp, freq, phase)
        };
        let (x_amp, x_freq, x_phase) = harmonics(40.0);
        let (y_amp, y_freq, y_phase) = harmonics(25.0);
        Self {
            x_amp,
            x_freq,
            x_phase,
            y_amp,
            y_freq,
            y_phase,
            pressure_peak: rng.range_f64(300.0, 800.0),
            azimuth_base: rng.range_f64(0.0, 360.0),
            azimuth_drift: rng.range_f64(-40.0, 40.0),
            altitude_base: rng.range_f64(30.0, 70.0),
            altitude_drift: rng.range_f64(-20.0, 20.0),
        }
    }
}

/// Builds the in-memory synthetic corpus.
///
/// Genuine sample: the signer template with small per-sample amplitude and
/// phase jitter plus additive noise. Forgery: the same template whose
/// amplitudes and phases are additionally perturbed proportionally to
/// `distortion`, with a `distortion`-deep warp of the time axis, plus the
/// same jitter a genuine writer would show.
pub fn generate_synthetic(params: &SynthParams) -> Result<DatasetDescriptor, DatasetError> {
    params.validate()?;
    let mut signers = Vec::with_capacity(params.n_signers);
    for signer in 0..params.n_signers {
        let template = SignerTemplate::draw(params.seed, signer as u64);
        let signer_id = format!("s{:03}", signer + 1);

        let genuine: Vec<RawSignature> = (0..params.n_genuine)
            .map(|sample| {
                synth_signature(
                    params,
                    &template,
                    &signer_id,
                    signer as u64,
                    sample as u32,
                    Label::Genuine,
                )
            })
            .collect();
        let forgeries: Vec<RawSignature> = (0..params.n_forgery)
            .map(|sample| {
                synth_signature(
                    params,
                    &template,
                    &signer_id,
                    signer as u64,
                    sample as u32,
                    Label::Forgery,
                )
            })
            .collect();
        signers.push(SignerRecord {
            signer_id,
            genuine,
            forgeries,
        });
    }
    Ok(DatasetDescriptor {
        root: PathBuf::new(),
        format: Source::Synthetic,
        signers,
    })
}

fn synth_signature(
    params: &SynthParams,
    template: &SignerTemplate,
    signer_id: &str,
    signer: u64,
    sample: u32,
    label: Label,
) -> RawSignature {
    let kind = match label {
        Label::Genuine => KIND_GENUINE,
        Label::Forgery => KIND_FORGERY,
    };
    let mut rng = SplitMix64::keyed(params.seed, &[signer, kind, sample as u64]);
    let delta = if label == Label::Forgery {
        params.distortion
    } else {
        0.0
    };

    // Per-sample jitter every writer shows, plus the forgery perturbation.
    let mut x_amp = template.x_amp;
    let mut x_phase = template.x_phase;
    let mut y_amp = template.y_amp;
    let mut y_phase = template.y_phase;
    for h in 0..3 {
        x_amp[h] *= 1.0
            + GENUINE_JITTER * rng.next_gaussian()
            + FORGERY_AMP_SCALE * delta * rng.next_gaussian();
        x_phase[h] += GENUINE_JITTER * rng.next_gaussian()
            + FORGERY_PHASE_SCALE * delta * rng.next_gaussian();
        y_amp[h] *= 1.0
            + GENUINE_JITTER * rng.next_gaussian()
            + FORGERY_AMP_SCALE * delta * rng.next_gaussian();
        y_phase[h] += GENUINE_JITTER * rng.next_gaussian()
            + FORGERY_PHASE_SCALE * delta * rng.next_gaussian();
    }
    let pressure_scale =
        1.0 + GENUINE_JITTER * rng.next_gaussian() + 0.3 * delta * rng.next_gaussian();
    let warp_depth =
        0.01 * rng.next_gaussian() + FORGERY_WARP_SCALE * delta * rng.range_f64(-1.0, 1.0);
    let noise_amp = 0.5;

    let n = params.n_points;
    let points: Vec<SamplePoint> = (0..n)
        .map(|i| {
            let u = i as f64 / (n - 1) as f64;
            // Endpoint-preserving warp of the trajectory parameter.
            let warped = (u + warp_depth * (std::f64::consts::PI * u).sin()).clamp(0.0, 1.0);
            let eval = |amp: &[f64; 3], freq: &[f64; 3], phase: &[f64; 3]| -> f64 {
                (0..3)
                    .map(|h| amp[h] * (std::f64::consts::TAU * freq[h] * warped + phase[h]).sin())
                    .sum()
            };
            let x = eval(&x_amp, &template.x_freq, &x_phase) + noise_amp * rng.next_gaussian();
            let y = eval(&y_amp, &template.y_freq, &y_phase) + noise_amp * rng.next_gaussian();
            let pressure =
                (template.pressure_peak * pressure_scale * (std::f64::consts::PI * warped).sin()
                    + 2.0 * rng.next_gaussian())
                .max(0.0);
            SamplePoint {
                x,
                y,
                t: i as f64 * SYNTH_TIMESTAMP_STEP_MS,
                pressure,
                azimuth: template.azimuth_base
                    + template.azimuth_drift * warped
                    + 0.5 * rng.next_gaussian(),
                altitude: template.altitude_base
                    + template.altitude_drift * warped
                    + 0.5 * rng.next_gaussian(),
                pen_down: pressure > 0.0,
            }
        })
        .collect();

    RawSignature {
        signer_id: signer_id.to_string(),
        sample_index: sample + 1,
        label,
        points,
        source: Source::Synthetic,
    }
}

/// Corpus manifest written next to the generated files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub format_version: u32,
    pub params: SynthParams,
    pub n_signers: usize,
    pub files_per_signer: usize,
    pub total_files: usize,
}

/// Writes a corpus to `<out>/<signer>/<genuine|forgery>/<idx>.csv` plus a
/// `manifest.json`, and returns the number of signature files written.
pub fn write_corpus(
    descriptor: &DatasetDescriptor,
    params: &SynthParams,
    out: &Path,
) -> Result<usize, DatasetError> {
    let mut total = 0usize;
    for record in &descriptor.signers {
        for (subdir, samples) in [("genuine", &record.genuine), ("forgery", &record.forgeries)] {
            let dir = out.join(&record.signer_id).join(subdir);
            fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
            for sig in samples {
                let path = dir.join(format!("{:03}.csv", sig.sample_index));
                write_csv_file(sig, &path)?;
                total += 1;
            }
        }
    }
    let manifest = CorpusManifest {
        format_version: 1,
        params: params.clone(),
        n_signers: descriptor.signers.len(),
        files_per_signer: params.n_genuine + params.n_forgery,
        total_files: total,
    };
    let path = out.join("manifest.json");
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, body).map_err(|e| io_err(&path, e))?;
    Ok(total)
}

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

/// A disjoint train/test partition of one signer's samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTestSplit {
    pub train: SignerRecord,
    pub test: SignerRecord,
}

/// Seeded shuffle-then-split. The stream is keyed by the seed and the
/// signer id, so per-signer splits are independent and reproducible. The
/// test side always keeps at least one genuine and one forgery sample.
pub fn split(
    record: &SignerRecord,
    n_train_genuine: usize,
    n_train_forgery: usize,
    seed: u64,
) -> Result<TrainTestSplit, DatasetError> {
    if n_train_genuine + 1 > record.genuine.len() {
        return Err(DatasetError::NotEnoughSamples {
            requested: n_train_genuine,
            available: record.genuine.len(),
            what: "genuine",
        });
    }
    if n_train_forgery + 1 > record.forgeries.len() {
        return Err(DatasetError::NotEnoughSamples {
            requested: n_train_forgery,
            available: record.forgeries.len(),
            what: "forgery",
        });
    }
    let mut rng = SplitMix64::keyed(seed, &[fnv1a(record.signer_id.as_bytes())]);
    let mut genuine = record.genuine.clone();
    let mut forgeries = record.forgeries.clone();
    rng.shuffle(&mut genuine);
    rng.shuffle(&mut forgeries);
    let test_genuine = genuine.split_off(n_train_genuine);
    let test_forgery = forgeries.split_off(n_train_forgery);
    Ok(TrainTestSplit {
        train: SignerRecord {
            signer_id: record.signer_id.clone(),
            genuine,
            forgeries,
        },
        test: SignerRecord {
            signer_id: record.signer_id.clone(),
            genuine: test_genuine,
            forgeries: test_forgery,
        },
    })
}
