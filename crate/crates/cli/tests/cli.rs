use std::process::{Command, Output};

use pearcey_cli::format::{TrajectoryDocument, CSV_HEADER};

fn pearcey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pearcey"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn zeros_lists_the_first_phi_zeros() {
    let out = pearcey(&["zeros", "-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let zeros: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(zeros.len(), 3);
    assert!((zeros[0] - 2.441967903749558).abs() < 1e-12);
    assert!(zeros.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn airy_zeros_are_negative() {
    let out = pearcey(&[
        "zeros",
        "-n",
        "2",
        "--function",
        "ai-prime",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let first = doc["values"][0].as_f64().unwrap();
    assert!((first + 1.018792971647471).abs() < 1e-12, "{first}");
}

#[test]
fn trace_csv_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["trace", "--t-end", "1", "--dt", "0.05"];
    let a = pearcey(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_pearcey"))
        .args(args)
        .env(pearcey_cli::THREADS_ENV, "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let data = rows(&text);
    assert_eq!(data.len(), 21);
    assert!(data.iter().all(|r| r[3] < 1e-6));
}

#[test]
fn json_document_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    let out = pearcey(&[
        "trace",
        "--t-end",
        "0.5",
        "--sign",
        "negative",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = TrajectoryDocument::from_json(&text).unwrap();
    assert_eq!(doc.metadata.sign, "negative");
    assert_eq!(doc.metadata.method, "rayleigh");
    assert_eq!(doc.trajectory.len(), 51);
    assert!(doc.trajectory.samples[0].f < 0.0);
    assert!(doc.truncated.is_none());
    assert_eq!(doc.to_json().unwrap(), text);
}

#[test]
fn merging_branches_truncate_with_trailer() {
    let out = pearcey(&[
        "trace", "--kernel", "hermite", "--t-end", "3", "--dt", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("# TRUNCATED at t=2"), "{last}");
    let data = rows(&text);
    assert!((data.last().unwrap()[0] - 2.0).abs() < 1e-12);
    assert!(data.iter().all(|r| r[3] < 1e-10));
}

#[test]
fn closed_form_boundaries_are_traced() {
    for kernel in ["airy3", "shifted-cubic", "linear", "airy-prime"] {
        let out = pearcey(&["trace", "--kernel", kernel, "--t-end", "2", "--dt", "0.25"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{kernel}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let data = rows(&stdout(&out));
        assert!(data.iter().all(|r| r[3] < 1e-6), "{kernel}");
    }
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(
        pearcey(&["trace", "--kernel", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pearcey(&["trace", "--zero-index", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pearcey(&["trace", "--project", "sometimes"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pearcey(&["eval", "--t", "-1", "--x", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(pearcey(&["zeros", "-n", "0"]).status.code(), Some(2));
}

#[test]
fn eval_prints_value_and_error() {
    let out = pearcey(&["eval", "--t", "0", "--x", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let fields: Vec<f64> = text
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    assert!((fields[0] - 0.4080244695491315).abs() < 1e-12);
    assert!(fields[1] >= 0.0 && fields[1] < 1e-8);
}

#[test]
fn verify_subset_passes() {
    let out = pearcey(&["verify", "--hermite-discrepancy", "--scaled-limit"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["pass"], true);
    assert!(doc["reports"].as_array().unwrap().is_empty());
}

#[test]
fn restart_window_is_centred() {
    let out = pearcey(&["trace", "--restart", "6", "--epsilon", "0.5", "--dt", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let data = rows(&stdout(&out));
    assert!((data[0][0] - 5.5).abs() < 1e-12 && (data.last().unwrap()[0] - 6.5).abs() < 1e-12);
    assert!(data.iter().all(|r| r[3] < 1e-8));
}
