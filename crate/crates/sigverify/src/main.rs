//! Thin command-line front end over the sigverify library.
//!
//! Exit codes: 0 success (or "genuine" for `verify`), 1 "forgery" decision,
//! 2 I/O or unreadable input, 3 configuration error, 4 data error,
//! 5 training non-convergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sigverify::config::PipelineConfig;
use sigverify::datasets::{
    generate_synthetic, parse_csv_file, parse_svc2004_file, scan_csv_dir, scan_svc2004_dir,
    write_corpus, DatasetDescriptor, ScanWarning, SynthParams, SVC2004_GENUINE_PER_USER,
};
use sigverify::eval::{format_pct, write_report_csv, write_roc_csv};
use sigverify::pipeline::{evaluate_all, train_all, verify, PersistedModel, PipelineError};
use sigverify::signal::{RawSignature, Source};

#[derive(Parser)]
#[command(
    name = "sigverify",
    version,
    about = "Online signature verification: synthesize corpora, train per-signer models, verify signatures, evaluate FAR/FRR/EER"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic synthetic corpus.
    Synth(SynthArgs),
    /// Train per-signer models and persist them.
    Train(TrainArgs),
    /// Verify one signature file against an enrolled signer.
    Verify(VerifyArgs),
    /// Run the full train/test evaluation and emit report + ROC CSVs.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Corpus seed; identical seeds reproduce identical bytes.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of signers.
    #[arg(long, default_value_t = 10)]
    signers: usize,
    /// Genuine samples per signer.
    #[arg(long, default_value_t = 20)]
    genuine: usize,
    /// Forgery samples per signer.
    #[arg(long, default_value_t = 20)]
    forgery: usize,
    /// Points per signature.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Forgery distortion in [0, 1].
    #[arg(long, default_value_t = 0.3)]
    distortion: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svc2004,
    Csv,
    Synthetic,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset directory.
    #[arg(long)]
    data: PathBuf,
    /// Dataset format.
    #[arg(long, value_enum)]
    format: Format,
    /// Optional TOML config; defaults reproduce the reference dimensioning.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where to write the model file.
    #[arg(long, value_name = "PATH")]
    model_out: PathBuf,
    /// Genuine/forgery file-index cutoff for svc2004 directories.
    #[arg(long, default_value_t = SVC2004_GENUINE_PER_USER)]
    genuine_per_user: u32,
    /// Smoothing window (odd). Without a value, 3.
    #[arg(long, num_args = 0..=1, default_missing_value = "3")]
    smooth: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trained model file.
    #[arg(long)]
    model: PathBuf,
    /// Signature file (.txt is parsed as SVC2004, anything else as CSV).
    #[arg(long)]
    signature: PathBuf,
    /// Enrolled signer id to verify against.
    #[arg(long)]
    signer: String,
    /// Override the calibrated acceptance threshold.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Dataset directory.
    #[arg(long)]
    data: PathBuf,
    /// Dataset format.
    #[arg(long, value_enum)]
    format: Format,
    /// Optional TOML config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Where to write the per-signer report CSV.
    #[arg(long)]
    report: PathBuf,
    /// Where to write the ROC sweep CSV.
    #[arg(long)]
    roc: PathBuf,
    /// Genuine/forgery file-index cutoff for svc2004 directories.
    #[arg(long, default_value_t = SVC2004_GENUINE_PER_USER)]
    genuine_per_user: u32,
    /// Smoothing window (odd). Without a value, 3.
    #[arg(long, num_args = 0..=1, default_missing_value = "3")]
    smooth: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Train(args) => cmd_train(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Evaluate(args) => cmd_evaluate(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(err.exit_code())
        }
    }
}

fn cmd_synth(args: SynthArgs) -> Result<ExitCode, PipelineError> {
    let params = SynthParams {
        seed: args.seed,
        n_signers: args.signers,
        n_genuine: args.genuine,
        n_forgery: args.forgery,
        n_points: args.points,
        distortion: args.distortion,
    };
    let corpus = generate_synthetic(&params)?;
    let written = write_corpus(&corpus, &params, &args.out)?;
    println!(
        "wrote {written} signature files for {} signer(s) under {} (+ manifest.json)",
        corpus.signers.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn load_config(
    path: Option<&Path>,
    smooth: Option<usize>,
) -> Result<PipelineConfig, PipelineError> {
    let mut config = match path {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(window) = smooth {
        config.smooth_window = window;
    }
    config.validate()?;
    Ok(config)
}

fn load_dataset(
    data: &Path,
    format: Format,
    genuine_per_user: u32,
) -> Result<(DatasetDescriptor, Vec<ScanWarning>), PipelineError> {
    let scanned = match format {
        Format::Svc2004 => scan_svc2004_dir(data, genuine_per_user)?,
        Format::Csv => scan_csv_dir(data, Source::Csv)?,
        Format::Synthetic => scan_csv_dir(data, Source::Synthetic)?,
    };
    Ok(scanned)
}

fn print_warnings(warnings: &[ScanWarning]) {
    for w in warnings {
        eprintln!("warning: {}: {}", w.path, w.message);
    }
}

fn cmd_train(args: TrainArgs) -> Result<ExitCode, PipelineError> {
    let config = load_config(args.config.as_deref(), args.smooth)?;
    let (descriptor, warnings) = load_dataset(&args.data, args.format, args.genuine_per_user)?;
    print_warnings(&warnings);
    let model = train_all(&descriptor, &config)?;
    for s in &model.signers {
        let d = &s.diagnostics;
        println!(
            "trained {}: {} genuine + {} {} | svm sv={} acc={:.0}% sweeps={} | train EER {}% @ threshold {:.6}",
            s.signer_id,
            d.n_train_genuine,
            d.n_train_forgery,
            if d.used_random_forgeries { "random forgeries" } else { "forgeries" },
            d.svm.n_support_vectors,
            100.0 * d.svm.training_accuracy,
            d.svm.sweeps,
            format_pct(d.train_eer_pct),
            s.verify_threshold,
        );
    }
    model.save(&args.model_out)?;
    println!(
        "saved {} signer model(s) to {}",
        model.signers.len(),
        args.model_out.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// `.txt` files are parsed as SVC2004 trajectories, anything else as the
/// generic CSV. Any parse failure is an unreadable-input error (exit 2).
fn read_signature(path: &Path) -> Result<RawSignature, PipelineError> {
    let is_txt = path
        .extension()
        .map(|e| e.to_string_lossy().eq_ignore_ascii_case("txt"))
        .unwrap_or(false);
    let parsed = if is_txt {
        parse_svc2004_file(path)
    } else {
        parse_csv_file(path)
    };
    parsed.map_err(|err| PipelineError::UnreadableInput {
        path: path.display().to_string(),
        detail: err.to_string(),
    })
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, PipelineError> {
    let model = PersistedModel::load(&args.model)?;
    let sig = read_signature(&args.signature)?;
    let verdict = verify(&model, &args.signer, &sig, args.threshold)?;
    println!(
        "{}",
        serde_json::to_string(&verdict).expect("verdict serializes")
    );
    Ok(if verdict.is_genuine() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<ExitCode, PipelineError> {
    let config = load_config(args.config.as_deref(), args.smooth)?;
    let (descriptor, warnings) = load_dataset(&args.data, args.format, args.genuine_per_user)?;
    print_warnings(&warnings);
    let output = evaluate_all(&descriptor, &config)?;
    for (signer_id, why) in &output.skipped {
        eprintln!("warning: skipped {signer_id}: {why}");
    }

    let mut report_file = Vec::new();
    write_report_csv(&output.report, &mut report_file).expect("write to buffer");
    std::fs::write(&args.report, report_file).map_err(|source| PipelineError::Io {
        path: args.report.display().to_string(),
        source,
    })?;

    let mut roc_file = Vec::new();
    write_roc_csv(&output.roc, &mut roc_file).expect("write to buffer");
    std::fs::write(&args.roc, roc_file).map_err(|source| PipelineError::Io {
        path: args.roc.display().to_string(),
        source,
    })?;

    for s in &output.report.signers {
        println!(
            "{}: EER {}% @ {:.6} | zero-threshold FAR {}% FRR {}% | {} genuine / {} forgery",
            s.signer_id,
            format_pct(s.eer_pct),
            s.eer_threshold,
            format_pct(s.far_at_zero_pct),
            format_pct(s.frr_at_zero_pct),
            s.n_genuine,
            s.n_forgery
        );
    }
    println!(
        "mean_EER={}% correct_rate={}%",
        format_pct(output.report.mean_eer_pct),
        format_pct(output.report.correct_rate_pct)
    );
    Ok(ExitCode::SUCCESS)
}
