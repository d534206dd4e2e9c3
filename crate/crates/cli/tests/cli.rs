use std::process::{Command, Output};

use settled::dynamics::SettleProfile;

fn settled(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_settled"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = settled(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn profile_csv_round_trips() {
    let csv = stdout(&[
        "profile",
        "--expr",
        "z[3]",
        "--max-level",
        "12",
        "--format",
        "csv",
    ]);
    let p = SettleProfile::from_csv(&csv).unwrap();
    assert_eq!(p.rows.len(), 12);
    let last = p.rows.last().unwrap();
    assert!(last.stable >= (1 << 12) - 4);
    assert_eq!(p.to_csv(), csv);
}

#[test]
fn gamma_has_one_full_cycle_per_level() {
    let csv = stdout(&[
        "cycles",
        "--expr",
        "g",
        "--max-level",
        "5",
        "--format",
        "csv",
    ]);
    let lengths: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(lengths, ["2", "4", "8", "16", "32"]);
}

#[test]
fn descendant_labels_square() {
    let json = stdout(&["descendants", "--expr", "a1*z[3]", "--depth", "3"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let labels: Vec<String> = v
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["in_u_gamma"] == "no")
        .map(|e| e["coset_label"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(labels, ["3", "9", "81", "81"]);
    assert!(json.contains("a2*g*z[9]"));
}

#[test]
fn portrait_only_expressions() {
    let csv = stdout(&["eval", "--expr", "s", "--max-level", "3", "--format", "csv"]);
    assert_eq!(csv.lines().nth(1), Some("1,-1,2x1"));
    let out = settled(&["profile", "--expr", "s"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_inputs_exit_nonzero() {
    for args in [
        &["eval", "--expr", "z[4]"][..],
        &["profile", "--expr", "z[3]", "--max-level", "60"],
        &[
            "profile",
            "--expr",
            "z[3]",
            "--precision",
            "12",
            "--max-level",
            "10",
        ],
        &["eval", "--expr", "a3", "--r", "2"],
        &["verify", "--suite", "nonexistent"],
        &["profile"],
    ] {
        let out = settled(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn unknown_renders_as_unknown() {
    // k = 1 to the 8 known bits cannot be told apart from 1.
    let csv = stdout(&[
        "descendants",
        "--expr",
        "g*z[1%8]",
        "--depth",
        "1",
        "--format",
        "csv",
    ]);
    assert!(csv.lines().nth(1).unwrap().contains("unknown"), "{csv}");
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = settled(&[
            "verify",
            "--suite",
            "conjugation",
            "--suite",
            "counting_laws",
            "--seed",
            "7",
            "--max-level",
            "6",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    let report: serde_json::Value = serde_json::from_slice(&x).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["passed"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_reads_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.toml");
    let grid = settled::verify::DEFAULT_GRID.replace("ks = [5, 9, 17, 33]\nms", "ks = [5, 9]\nms");
    std::fs::write(&path, grid).unwrap();
    let json = stdout(&[
        "verify",
        "--config",
        path.to_str().unwrap(),
        "--suite",
        "triviality",
    ]);
    let report: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(
        report["grid"]["triviality"]["ks"],
        serde_json::json!([5, 9])
    );

    std::fs::write(&path, "version = 9\n").unwrap();
    assert_eq!(
        settled(&["verify", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn approximation_is_verified() {
    let json = stdout(&["approx-dense", "--expr", "g*z[3]", "--max-level", "6"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["verified"], true);
    assert_eq!(v["k0"], "3");
}
