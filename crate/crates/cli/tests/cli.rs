use std::path::Path;
use std::process::Command;

use serde_json::Value;
use toric_bloch_cli::{main_with_args, EXIT_INVALID, EXIT_MISMATCH, EXIT_OK};

fn run(args: &[&str], out: &Path) -> i32 {
    let mut full = vec!["toric-bloch".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.push("--output".into());
    full.push(out.to_string_lossy().into_owned());
    main_with_args(full)
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let code = run(args, &out);
    let text = std::fs::read_to_string(&out).unwrap_or_else(|_| "null".into());
    (code, serde_json::from_str(&text).unwrap())
}

fn run_text(args: &[&str]) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.txt");
    let code = run(args, &out);
    (code, std::fs::read_to_string(&out).unwrap_or_default())
}

#[test]
fn sweep_csv_contract() {
    let (code, text) = run_text(&["sweep", "--k", "5", "--L", "1", "--theta", "0:pi:8", "--phi", "0:2pi:4"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "theta,phi,S2");
    assert_eq!(lines.len(), 1 + 32);
    assert!(!text.contains('\r'));
    let last: Vec<f64> = lines[32].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(last[0], std::f64::consts::PI);
    assert_eq!(last[1], 2.0 * std::f64::consts::PI);
    assert!(last[2] > 0.0);
}

#[test]
fn paper_scale_sweep_row_count() {
    let (code, text) =
        run_text(&["sweep", "--k", "20", "--L", "10", "--theta", "0:pi:64", "--phi", "0:2pi:64"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(text.lines().count(), 1 + 4096);
}

#[test]
fn sweep_output_is_deterministic() {
    let args = ["sweep", "--k", "6", "--L", "2", "--theta", "0:pi:9", "--phi", "0:2pi:5"];
    let (_, a) = run_text(&args);
    let (_, b) = run_text(&args);
    assert_eq!(a, b);
    let (_, j) = run_json(&[&args[..], &["--format", "json"]].concat());
    assert_eq!(j.as_array().unwrap().len(), 45);
    assert!(j[0].get("S2").is_some());
}

#[test]
fn curve_csv_contract() {
    let (code, text) = run_text(&["curve", "--k", "5", "--L", "1", "--theta", "0:pi:11", "--phi", "pi/2"]);
    assert_eq!(code, EXIT_OK);
    assert!(text.starts_with("theta,S2\n"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn gamma_at_toric_point() {
    let (code, v) = run_json(&["gamma", "--k", "4", "--phi", "0", "--theta-at", "toric", "--L", "1,2"]);
    assert_eq!(code, EXIT_OK);
    assert!((v["s_gamma"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert!((v["alpha"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert_eq!(v["fit_mode"], "two-term");
    assert_eq!(v["L_values"], serde_json::json!([1, 2]));

    let (code, v) = run_json(&["gamma", "--k", "4", "--theta-at", "2.5", "--L", "1,2"]);
    assert_eq!(code, EXIT_OK);
    assert!((v["s_gamma"].as_f64().unwrap() + 1.0).abs() > 1e-3);
}

#[test]
fn verify_example_passes() {
    let (code, v) = run_json(&["verify", "--k", "3", "--subset", "block:1", "--theta", "0.7", "--phi", "1.1"]);
    assert_eq!(code, EXIT_OK);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["pass"].as_bool().unwrap());
        assert!(c["deviation"].as_f64().unwrap() <= 1e-10);
    }
    let (code, _) = run_json(&["verify", "--k", "2", "--subset", "links:h:0,0;v:1,1", "--theta", "pi/3"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn grover_modes() {
    let (code, v) = run_json(&["grover", "--log2-g", "2", "--iterations", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!((v["success_prob"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let (_, v) = run_json(&["grover", "--log2-g", "8", "--optimal"]);
    assert_eq!(v["m"], 12);
    assert!(v["success_prob"].as_f64().unwrap() >= 0.9999);

    let (_, v) = run_json(&["grover", "--log2-g", "399", "--optimal"]);
    assert!(v["m"].is_string());
    assert!(v["log2_failure"].as_f64().unwrap() <= -399.0);

    let (_, v) = run_json(&["grover", "--log2-g", "15", "--inverse"]);
    assert!(v["infidelity"].as_f64().unwrap() <= 1.0 / 32768.0);

    let (_, v) = run_json(&["grover", "--log2-g", "2", "--fractional", "0.5"]);
    let amp0 = v["amp0"][0].as_f64().unwrap();
    assert!((amp0 - (std::f64::consts::PI / 3.0).sin()).abs() < 1e-15);

    let (code, _) = run_json(&["grover", "--log2-g", "8"]);
    assert_eq!(code, EXIT_INVALID);
    let (code, _) = run_json(&["grover", "--log2-g", "8", "--optimal", "--inverse"]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn classify_report() {
    let (code, v) = run_json(&["classify", "--k", "6", "--L", "2", "--theta", "0:pi:9", "--phi", "0:2pi:4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["class4_consistent"], true);
    assert_eq!(v["max_s2_at_pole"], 0.0);
    assert!(v["min_s2_off_pole"].as_f64().unwrap() > 0.0);
    assert!(v["disclaimer"].as_str().unwrap().contains("interior"));
}

#[test]
fn maxdrift_report() {
    let (code, v) = run_json(&["maxdrift", "--k", "20", "--L", "2,4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["shifts_right"], true);
    assert_eq!(v["maxima"].as_array().unwrap().len(), 2);
}

#[test]
fn validation_failures_exit_2() {
    for args in [
        vec!["sweep", "--k", "3", "--L", "2"],
        vec!["sweep", "--k", "5", "--L", "1", "--theta", "0:pi:0"],
        vec!["sweep", "--k", "5", "--L", "1", "--theta", "0:4:3"],
        vec!["sweep", "--k", "5", "--L", "1", "--precision", "32"],
        vec!["verify", "--k", "5", "--subset", "block:1", "--theta", "1"],
        vec!["verify", "--k", "3", "--subset", "disc:1", "--theta", "1"],
        vec!["gamma", "--k", "4", "--L", "1"],
        vec!["bogus"],
    ] {
        let (code, _) = run_text(&args);
        assert_eq!(code, EXIT_INVALID, "{args:?}");
    }
}

#[test]
fn error_classes_map_to_exit_codes() {
    use toric_bloch::Error;
    use toric_bloch_cli::{CliError, EXIT_NUMERICAL};
    let numerical = CliError::from(Error::PrecisionTooLow { bits: 64, surviving: 3.0 });
    assert_eq!(numerical.exit_code(), EXIT_NUMERICAL);
    let residue = CliError::from(Error::NonRealResidue { residue: 1e-3 });
    assert_eq!(residue.exit_code(), EXIT_NUMERICAL);
    let invalid = CliError::from(Error::InvalidInput("x".into()));
    assert_eq!(invalid.exit_code(), EXIT_INVALID);
    assert_eq!(CliError::Mismatch("general_vs_oracle".into()).exit_code(), EXIT_MISMATCH);
}

#[test]
fn binary_reads_precision_from_environment() {
    let bin = env!("CARGO_BIN_EXE_toric-bloch");
    let status = Command::new(bin)
        .args(["curve", "--k", "4", "--L", "1", "--theta", "1:1:1"])
        .env("TORIC_BLOCH_PRECISION", "16")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INVALID));
    let ok = Command::new(bin)
        .args(["curve", "--k", "4", "--L", "1", "--theta", "1:1:1"])
        .env("TORIC_BLOCH_PRECISION", "128")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn output_file_is_replaced_whole() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    std::fs::write(&out, "stale contents that are longer than the new file\n".repeat(100)).unwrap();
    assert_eq!(run(&["curve", "--k", "4", "--L", "1", "--theta", "0:pi:3"], &out), EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains("stale"));
    assert_eq!(text.lines().count(), 4);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}
