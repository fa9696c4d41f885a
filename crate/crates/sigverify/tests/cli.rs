//! End-to-end checks of the `sigverify` binary: subcommand flows, the
//! exit-code contract, and byte-level determinism of emitted files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sigverify"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_exit(output: &Output, expected: i32) {
    let code = output.status.code().expect("no signal");
    assert_eq!(
        code,
        expected,
        "expected exit {expected}, got {code}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Small corpus + config so the whole binary flow stays fast.
fn synth_corpus(dir: &Path, distortion: f64) -> PathBuf {
    let data = dir.join(format!("data_{distortion}"));
    let output = run(&[
        "synth",
        "--seed",
        "42",
        "--signers",
        "4",
        "--genuine",
        "8",
        "--forgery",
        "8",
        "--points",
        "64",
        "--distortion",
        &distortion.to_string(),
        "--out",
        data.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    data
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(
        &path,
        "[pca]\ntransform_k = 5\nstats_k = 2\n\n[split]\ntrain_genuine = 4\ntrain_forgery = 4\n",
    )
    .unwrap();
    path
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                files.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn synth_writes_expected_file_count_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = synth_corpus(dir.path(), 0.3);
    let csvs = read_tree(&a)
        .iter()
        .filter(|(name, _)| name.ends_with(".csv"))
        .count();
    assert_eq!(csvs, 4 * 16);
    assert!(a.join("manifest.json").is_file());

    let b_dir = TempDir::new().unwrap();
    let b = synth_corpus(b_dir.path(), 0.3);
    assert_eq!(read_tree(&a), read_tree(&b), "rerun not byte-identical");
}

#[test]
fn synth_unwritable_destination_exits_2() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "file, not a directory").unwrap();
    let out = blocker.join("sub");
    let output = run(&[
        "synth",
        "--seed",
        "1",
        "--signers",
        "1",
        "--genuine",
        "2",
        "--forgery",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_exit(&output, 2);
}

#[test]
fn train_then_verify_decision_exit_codes() {
    let dir = TempDir::new().unwrap();
    // Extreme distortion: forgeries grossly different, decisions reliable.
    let data = synth_corpus(dir.path(), 1.0);
    let config = small_config(dir.path());
    let model = dir.path().join("model.json");

    let output = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--format",
        "synthetic",
        "--config",
        config.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert_eq!(stdout.matches("trained s0").count(), 4, "{stdout}");

    // Training genuine sample: accepted, exit 0, JSON verdict on stdout.
    let genuine = data.join("s001/genuine/001.csv");
    let output = run(&[
        "verify",
        "--model",
        model.to_str().unwrap(),
        "--signature",
        genuine.to_str().unwrap(),
        "--signer",
        "s001",
    ]);
    assert_exit(&output, 0);
    let verdict: serde_json::Value =
        serde_json::from_slice(&output.stdout).expect("JSON verdict line");
    assert_eq!(verdict["decision"], "genuine");
    assert_eq!(verdict["signer"], "s001");
    assert!(verdict["score"].is_f64() || verdict["score"].is_number());

    // Gross forgery: rejected, exit 1.
    let forgery = data.join("s001/forgery/001.csv");
    let output = run(&[
        "verify",
        "--model",
        model.to_str().unwrap(),
        "--signature",
        forgery.to_str().unwrap(),
        "--signer",
        "s001",
    ]);
    assert_exit(&output, 1);
    let verdict: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(verdict["decision"], "forgery");

    // Unknown signer: exit 4.
    let output = run(&[
        "verify",
        "--model",
        model.to_str().unwrap(),
        "--signature",
        genuine.to_str().unwrap(),
        "--signer",
        "ghost",
    ]);
    assert_exit(&output, 4);

    // Unreadable signature file: exit 2.
    let junk = dir.path().join("junk.csv");
    std::fs::write(&junk, "not,a,signature\n1,2,3\n").unwrap();
    let output = run(&[
        "verify",
        "--model",
        model.to_str().unwrap(),
        "--signature",
        junk.to_str().unwrap(),
        "--signer",
        "s001",
    ]);
    assert_exit(&output, 2);

    // Threshold override flips an accept into a reject.
    let output = run(&[
        "verify",
        "--model",
        model.to_str().unwrap(),
        "--signature",
        genuine.to_str().unwrap(),
        "--signer",
        "s001",
        "--threshold",
        "1e9",
    ]);
    assert_exit(&output, 1);
}

#[test]
fn missing_config_exits_3() {
    let dir = TempDir::new().unwrap();
    let data = synth_corpus(dir.path(), 0.3);
    let output = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--format",
        "synthetic",
        "--config",
        dir.path().join("nope.toml").to_str().unwrap(),
        "--model-out",
        dir.path().join("model.json").to_str().unwrap(),
    ]);
    assert_exit(&output, 3);
}

#[test]
fn oversized_transform_k_exits_3_naming_constraint() {
    let dir = TempDir::new().unwrap();
    let data = synth_corpus(dir.path(), 0.3);
    let config = dir.path().join("bad.toml");
    std::fs::write(
        &config,
        "[pca]\ntransform_k = 8\n\n[split]\ntrain_genuine = 4\ntrain_forgery = 4\n",
    )
    .unwrap();
    let output = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--format",
        "synthetic",
        "--config",
        config.to_str().unwrap(),
        "--model-out",
        dir.path().join("model.json").to_str().unwrap(),
    ]);
    assert_exit(&output, 3);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("transform_k"), "{stderr}");
}

#[test]
fn unknown_config_key_exits_3() {
    let dir = TempDir::new().unwrap();
    let data = synth_corpus(dir.path(), 0.3);
    let config = dir.path().join("typo.toml");
    std::fs::write(&config, "reticulate_splines = true\n").unwrap();
    let output = run(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--format",
        "synthetic",
        "--config",
        config.to_str().unwrap(),
        "--model-out",
        dir.path().join("model.json").to_str().unwrap(),
    ]);
    assert_exit(&output, 3);
}

#[test]
fn evaluate_emits_csvs_and_aggregate_line_deterministically() {
    let dir = TempDir::new().unwrap();
    let data = synth_corpus(dir.path(), 0.5);
    let config = small_config(dir.path());

    let evaluate = |report: &Path, roc: &Path, threads: Option<&str>| -> Output {
        let mut cmd = bin();
        cmd.args([
            "evaluate",
            "--data",
            data.to_str().unwrap(),
            "--format",
            "synthetic",
            "--config",
            config.to_str().unwrap(),
            "--report",
            report.to_str().unwrap(),
            "--roc",
            roc.to_str().unwrap(),
        ]);
        if let Some(n) = threads {
            cmd.env("SIGVERIFY_THREADS", n);
        }
        cmd.output().expect("binary runs")
    };

    let report_a = dir.path().join("report_a.csv");
    let roc_a = dir.path().join("roc_a.csv");
    let output = evaluate(&report_a, &roc_a, None);
    assert_exit(&output, 0);
    let stdout = String::from_utf8_lossy(&output.stdout);
    let aggregate = stdout.lines().last().unwrap();
    assert!(
        aggregate.starts_with("mean_EER=") && aggregate.contains("% correct_rate="),
        "{aggregate}"
    );

    let report_text = std::fs::read_to_string(&report_a).unwrap();
    let mut lines = report_text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "signer_id,mode,eer_pct,eer_threshold,far_at_zero_pct,frr_at_zero_pct,n_genuine,n_forgery"
    );
    assert_eq!(lines.count(), 4); // one row per signer
    let roc_text = std::fs::read_to_string(&roc_a).unwrap();
    assert!(roc_text.starts_with("signer_id,threshold,far_pct,frr_pct\n"));

    // Rerun, and rerun single-threaded: identical bytes either way.
    let report_b = dir.path().join("report_b.csv");
    let roc_b = dir.path().join("roc_b.csv");
    assert_exit(&evaluate(&report_b, &roc_b, None), 0);
    assert_eq!(
        std::fs::read(&report_a).unwrap(),
        std::fs::read(&report_b).unwrap()
    );
    assert_eq!(
        std::fs::read(&roc_a).unwrap(),
        std::fs::read(&roc_b).unwrap()
    );

    let report_c = dir.path().join("report_c.csv");
    let roc_c = dir.path().join("roc_c.csv");
    assert_exit(&evaluate(&report_c, &roc_c, Some("1")), 0);
    assert_eq!(
        std::fs::read(&report_a).unwrap(),
        std::fs::read(&report_c).unwrap()
    );
}

#[test]
fn evaluate_empty_dataset_exits_4() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let output = run(&[
        "evaluate",
        "--data",
        empty.to_str().unwrap(),
        "--format",
        "synthetic",
        "--report",
        dir.path().join("r.csv").to_str().unwrap(),
        "--roc",
        dir.path().join("roc.csv").to_str().unwrap(),
    ]);
    assert_exit(&output, 4);
}

#[test]
fn svc2004_directory_flow() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("svc");
    std::fs::create_dir_all(&data).unwrap();
    // Two signers, 6 samples each in the real file layout: 4 genuine with
    // small phase jitter, 2 "forgeries" with a different stroke frequency
    // (shape changes survive z-scoring; offsets would not).
    for user in 1..=2 {
        for sample in 1..=6u32 {
            let jitter = 0.05 * sample as f64;
            let freq = if sample <= 4 { 1.0 } else { 1.7 };
            let n = 32;
            let mut body = format!("{n}\n");
            for i in 0..n {
                let u = i as f64 / (n - 1) as f64;
                let x = 100.0 * (freq * std::f64::consts::TAU * u + user as f64 + jitter).sin();
                let y = 60.0 * (2.0 * freq * std::f64::consts::TAU * u + jitter).cos();
                body.push_str(&format!(
                    "{:.2} {:.2} {} 1 10 50 {:.1}\n",
                    x,
                    y,
                    i * 10,
                    300.0 * (std::f64::consts::PI * u).sin() * (1.0 + jitter)
                ));
            }
            std::fs::write(data.join(format!("U{user}S{sample}.TXT")), body).unwrap();
        }
    }
    let config = dir.path().join("config.toml");
    std::fs::write(
        &config,
        "[pca]\ntransform_k = 3\nstats_k = 1\n\n[split]\ntrain_genuine = 3\ntrain_forgery = 1\n",
    )
    .unwrap();
    let output = run(&[
        "evaluate",
        "--data",
        data.to_str().unwrap(),
        "--format",
        "svc2004",
        "--genuine-per-user",
        "4",
        "--config",
        config.to_str().unwrap(),
        "--report",
        dir.path().join("report.csv").to_str().unwrap(),
        "--roc",
        dir.path().join("roc.csv").to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(report.contains("U1,"), "{report}");
    assert!(report.contains("U2,"), "{report}");
}
