use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn comax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_comax"))
        .args(args)
        .env_remove("COMAX_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schema")
        .join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, report: &Value) {
    let errors: Vec<String> = validator
        .iter_errors(report)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:?}\n{report}");
}

#[test]
fn both_mode_agrees_on_three_columns() {
    let input = fixture("three_columns.json");
    let out = comax(&[
        "solve",
        "-p",
        "single-spca",
        "-i",
        input.to_str().unwrap(),
        "-m",
        "both",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["mode_agreement"], Value::Bool(true));
    assert!((report["value"].as_f64().unwrap() - 13.0).abs() < 1e-9);
    assert_eq!(report["support"], serde_json::json!([1, 3]));
    assert_valid(&schema("solve-report.schema.json"), &report);
}

#[test]
fn every_problem_and_mode_emits_schema_valid_reports() {
    let validator = schema("solve-report.schema.json");
    let dir = tempfile::tempdir().unwrap();
    for problem in [
        "single-spca",
        "nn-spca",
        "2st",
        "spca",
        "disjoint-spca",
        "matroid-convex",
        "custom-quadratic",
    ] {
        let inst = dir.path().join(format!("{problem}.json"));
        let (r, n) = if problem == "disjoint-spca" {
            ("1", "4")
        } else {
            ("2", "6")
        };
        let gen = comax(&[
            "gen",
            "--seed",
            "3",
            "-r",
            r,
            "-n",
            n,
            "-s",
            "2",
            "-p",
            problem,
            "-o",
            inst.to_str().unwrap(),
        ]);
        assert_eq!(
            gen.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&gen.stderr)
        );
        for mode in ["framework", "oracle", "both"] {
            let out = comax(&[
                "solve",
                "-p",
                problem,
                "-i",
                inst.to_str().unwrap(),
                "-m",
                mode,
            ]);
            assert_eq!(
                out.status.code(),
                Some(0),
                "{problem} {mode}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            assert_valid(&validator, &stdout_json(&out));
        }
    }
}

#[test]
fn csv_factor_input_with_sparsity_flag() {
    let input = fixture("three_columns.csv");
    let out = comax(&[
        "solve",
        "-p",
        "single-spca",
        "-i",
        input.to_str().unwrap(),
        "-s",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!((stdout_json(&out)["value"].as_f64().unwrap() - 9.0).abs() < 1e-9);
}

#[test]
fn malformed_csv_exits_one() {
    let input = fixture("malformed.csv");
    let out = comax(&["solve", "-p", "single-spca", "-i", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oops"));
}

#[test]
fn missing_file_exits_one() {
    let out = comax(&[
        "solve",
        "-p",
        "single-spca",
        "-i",
        "/nonexistent/instance.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn components_only_with_multi_component_problems() {
    let input = fixture("three_columns.json");
    let out = comax(&[
        "solve",
        "-p",
        "single-spca",
        "-i",
        input.to_str().unwrap(),
        "-d",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn disjoint_rank_three_exceeds_budget() {
    let input = fixture("disjoint_rank3.json");
    let out = comax(&[
        "solve",
        "-p",
        "disjoint-spca",
        "-i",
        input.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn disjoint_pair_fixture() {
    let input = fixture("disjoint_pair.json");
    let out = comax(&[
        "solve",
        "-p",
        "disjoint-spca",
        "-i",
        input.to_str().unwrap(),
        "-m",
        "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert!((report["value"].as_f64().unwrap() - 5.0).abs() < 1e-9);
    assert_eq!(report["solution"]["assignment"], serde_json::json!([2, 1]));
}

#[test]
fn check_verdicts() {
    let validator = schema("check-report.schema.json");
    for (file, verdict) in [
        ("cardinality.csv", "YES"),
        ("four_points.csv", "YES"),
        ("lattice.csv", "NO"),
    ] {
        let input = fixture(file);
        let out = comax(&["check", "-i", input.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let report = stdout_json(&out);
        assert_eq!(report["verdict"], verdict, "{file}");
        assert_valid(&validator, &report);
        if verdict == "NO" {
            assert_eq!(report["witness"]["v"], serde_json::json!([-2.0, 3.0, -1.0]));
        }
    }
}

#[test]
fn check_pretty_output() {
    let input = fixture("lattice.csv");
    let out = comax(&["check", "-i", input.to_str().unwrap(), "--format", "pretty"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("NO  witness v = (-2, 3, -1)"), "{text}");
}

#[test]
fn gen_is_reproducible() {
    let a = comax(&["gen", "--seed", "42", "-r", "2", "-n", "8", "-s", "3"]);
    let b = comax(&["gen", "--seed", "42", "-r", "2", "-n", "8", "-s", "3"]);
    let c = comax(&["gen", "--seed", "41", "-r", "2", "-n", "8", "-s", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_adversarial_has_repeated_columns() {
    let out = comax(&[
        "gen",
        "--seed",
        "1",
        "-r",
        "1",
        "-n",
        "6",
        "-s",
        "2",
        "--dist",
        "adversarial-ties",
    ]);
    let inst: Value = serde_json::from_slice(&out.stdout).unwrap();
    let row: Vec<f64> = inst["A"]
        .as_str()
        .unwrap()
        .trim()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    let mut abs: Vec<i64> = row.iter().map(|v| v.abs() as i64).collect();
    abs.sort_unstable();
    abs.dedup();
    assert!(abs.len() < row.len());
}

#[test]
fn csv_and_pretty_formats() {
    let input = fixture("three_columns.json");
    let csv = comax(&[
        "solve",
        "-p",
        "2st",
        "-i",
        input.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    // 2st needs a_lin, which this instance lacks.
    assert_eq!(csv.status.code(), Some(1));

    let csv = comax(&[
        "solve",
        "-p",
        "single-spca",
        "-i",
        input.to_str().unwrap(),
        "--format",
        "csv",
        "--no-timing",
    ]);
    let text = String::from_utf8_lossy(&csv.stdout);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert!(
        (fields[0].parse::<f64>().unwrap() - 13.0).abs() < 1e-9,
        "{text}"
    );
    assert_eq!(&fields[1..5], ["1;3", "signinv", "1", "3"], "{text}");

    let pretty = comax(&[
        "solve",
        "-p",
        "single-spca",
        "-i",
        input.to_str().unwrap(),
        "--format",
        "pretty",
    ]);
    let text = String::from_utf8_lossy(&pretty.stdout);
    assert!(text.contains("O(n^r)"), "{text}");
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    comax(&[
        "gen",
        "--seed",
        "9",
        "-r",
        "2",
        "-n",
        "9",
        "-s",
        "3",
        "-p",
        "2st",
        "-o",
        inst.to_str().unwrap(),
    ]);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_comax"))
            .args([
                "solve",
                "-p",
                "2st",
                "-i",
                inst.to_str().unwrap(),
                "--no-timing",
            ])
            .env("COMAX_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("8").stdout);
    assert_eq!(run("abc").status.code(), Some(1));
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let input = fixture("three_columns.json");
    let out = comax(&[
        "solve",
        "-p",
        "nn-spca",
        "-i",
        input.to_str().unwrap(),
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!((report["value"].as_f64().unwrap() - 13.0).abs() < 1e-9);
    assert_eq!(report["regime"], "nonneg");
}
