use std::path::{Path, PathBuf};
use std::process::Command as Process;

use mfa_cli::{emit_table, execute, parse_config, CliError, Command, Format, EXIT_USAGE};
use mfa_core::geometry::WitnessOutcome;
use mfa_core::spectrum::SpectrumRow;
use mfa_core::symbolic::MoranSummary;
use tempfile::TempDir;

const S1: &str = r#"{"probs": [0.3333333333333333, 0.6666666666666666], "ratios": [0.5, 0.5], "translations": [0.0, 0.5]}"#;

fn s1_file(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("s1.json");
    std::fs::write(&path, S1).unwrap();
    path
}

fn argv(path: &Path, rest: &[&str]) -> Vec<String> {
    let mut v = vec!["mfa".to_string(), rest[0].to_string(), "-s".to_string()];
    v.push(path.display().to_string());
    v.extend(rest[1..].iter().map(|s| s.to_string()));
    v
}

fn run_to_string(args: Vec<String>) -> String {
    let config = parse_config(args).unwrap();
    let mut out = Vec::new();
    execute(&config, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn parses_spectrum_config() {
    let dir = TempDir::new().unwrap();
    let path = s1_file(&dir);
    let config = parse_config(argv(&path, &["spectrum", "--q-grid", "-5:5:64"])).unwrap();
    assert!(matches!(config.command, Command::Spectrum { .. }));
    assert_eq!(config.q_grid.unwrap().points().len(), 64);
}

#[test]
fn parses_ball_config() {
    let dir = TempDir::new().unwrap();
    let path = s1_file(&dir);
    let config = parse_config(argv(
        &path,
        &["ball", "-x", "0.5", "-r", "0.25", "--tol", "1e-9"],
    ))
    .unwrap();
    match config.command {
        Command::Ball { x, r, tol, .. } => assert_eq!((x, r, tol), (0.5, 0.25, 1e-9)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn usage_errors() {
    let err = parse_config(["mfa", "spectrum"]).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_USAGE);
    let err = parse_config(["mfa", "spectrum", "-s", "/nonexistent/s1.json"]).unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    let dir = TempDir::new().unwrap();
    let path = s1_file(&dir);
    for bad in [
        vec!["ball", "-x", "2", "-r", "0.1"],
        vec!["ball", "-x", "0.5", "-r", "0.1", "--bogus"],
        vec!["spectrum", "--q-grid", "1:2"],
        vec!["doubling-scan", "-x", "0.5", "--gamma", "1"],
        vec!["assouad-scan", "-x", "0.5", "--scales", "2^(-k), k=3..1"],
        vec!["abundance", "--n", "20", "--delta", "0"],
    ] {
        let err = parse_config(argv(&path, &bad)).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE, "{bad:?}");
    }
}

#[test]
fn ball_output_is_four_ninths() {
    let dir = TempDir::new().unwrap();
    let path = s1_file(&dir);
    let out = run_to_string(argv(
        &path,
        &["ball", "-x", "0.5", "-r", "0.25", "--tol", "1e-9"],
    ));
    for col in ["lower", "upper"] {
        assert!((csv_column(&out, col)[0] - 4.0 / 9.0).abs() < 1e-9);
    }
}

#[test]
fn spectrum_tau_vanishes_at_one() {
    let dir = TempDir::new().unwrap();
    let path = s1_file(&dir);
    let out = run_to_string(argv(&path, &["spectrum", "--q-grid", "-2:2:5"]));
    let qs = csv_column(&out, "q");
    let taus = csv_column(&out, "tau");
    let at_one = qs.iter().position(|&q| q == 1.0).unwrap();
    assert!(taus[at_one].abs() < 1e-10);
}

#[test]
fn moran_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = s1_file(&dir);
    let out = run_to_string(argv(
        &path,
        &[
            "moran",
            "--alpha",
            "1.0",
            "--epsilon",
            "0.1",
            "--n",
            "64",
            "--stages",
            "10",
            "--format",
            "json",
        ],
    ));
    let value: serde_json::Value = serde_json::from_str(&out).unwrap();
    let spec: MoranSummary = serde_json::from_value(value["spec"].clone()).unwrap();
    let s_k: Vec<f64> = serde_json::from_value(value["s_k"].clone()).unwrap();
    assert_eq!(s_k.len(), 10);
    assert!(s_k.iter().all(|&sk| sk > spec.s));
}

#[test]
fn witness_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = s1_file(&dir);
    let out = run_to_string(argv(
        &path,
        &["witness", "--n-target", "4", "--format", "json"],
    ));
    let outcome: WitnessOutcome = serde_json::from_str(&out).unwrap();
    let pair = outcome.pair().unwrap();
    assert_eq!((pair.i.as_str(), pair.j.as_str()), ("2111", "1222"));
}

#[test]
fn emit_table_shapes() {
    let mut out = Vec::new();
    emit_table::<SpectrumRow, _>(&[], Format::Csv, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "q,tau,alpha,f,f_bar\n");

    let row = SpectrumRow {
        q: 1.0,
        tau: 0.0,
        alpha: 0.5,
        f: 0.5,
        f_bar: f64::INFINITY,
    };
    let mut out = Vec::new();
    emit_table(&[row], Format::Csv, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(!text.contains('\r'));

    let mut out = Vec::new();
    emit_table(&[row], Format::Json, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with(r#"[{"q":1.0,"tau":0.0,"alpha":0.5,"f":0.5,"f_bar":null}"#));
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_mfa"))
}

#[test]
fn exit_codes_and_determinism() {
    let dir = TempDir::new().unwrap();
    let path = s1_file(&dir);
    let path = path.to_str().unwrap();

    let status = binary().args(["spectrum"]).output().unwrap().status;
    assert_eq!(status.code(), Some(2));

    let out = binary()
        .args([
            "moran",
            "-s",
            path,
            "--alpha",
            "1.0",
            "--epsilon",
            "0.05",
            "--n",
            "16",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NeedLargerN"));

    let args = [
        "assouad-word",
        "-s",
        path,
        "--q",
        "0.5",
        "--length",
        "2000",
        "--seed",
        "9",
    ];
    let a = binary()
        .args(args)
        .env("MFA_THREADS", "1")
        .output()
        .unwrap();
    let b = binary()
        .args(args)
        .env("MFA_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let target = dir.path().join("scan.csv");
    let status = binary()
        .args([
            "doubling-scan",
            "-s",
            path,
            "-x",
            "0",
            "--scales",
            "2^(-k), k=1..5",
            "-o",
        ])
        .arg(&target)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("r,lower,upper,ratio_lower,ratio_upper\n"));
    assert_eq!(text.lines().count(), 6);
}
