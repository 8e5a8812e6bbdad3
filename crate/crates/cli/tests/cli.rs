//! End-to-end runs of the `shadowlab` binary.

use std::fs;
use std::process::{Command, Output};

fn shadowlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadowlab"))
        .args(args)
        .env_remove("SHADOWLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn orbit_csv_rows() {
    let out = shadowlab(&["orbit", "--system", "cat", "--x", "0.2,0.3", "--N", "50"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[0], "k,coord_0,coord_1");
    assert!(lines[1].starts_with("-50,"));
    assert!(lines[101].starts_with("50,"));
}

#[test]
fn orbit_of_a_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rot.csv");
    let out = shadowlab(&[
        "orbit",
        "--system",
        "rotation:0.6180339887498949",
        "--x",
        "0",
        "--N",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    let theta = 0.618_033_988_749_894_9f64;
    for row in rows {
        let expected = (row[0] * theta).rem_euclid(1.0);
        let d = row[1] - expected;
        assert!((d - d.round()).abs() < 1e-12);
    }
}

#[test]
fn orbit_without_anchor_is_a_usage_error() {
    let out = shadowlab(&["orbit", "--system", "cat", "--N", "5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_exit_codes() {
    let failed = shadowlab(&[
        "check",
        "inverse",
        "--system",
        "rotation:0",
        "--method",
        "rotation:+0.01",
        "--x",
        "0",
        "--eps",
        "0.1",
        "--N",
        "25",
    ]);
    assert_eq!(code(&failed), 3);
    let v = json(&failed);
    assert_eq!(v["property"], "inverse");
    assert_eq!(v["outcome"], "failed");
    assert_eq!(v["certified"], true);
    assert!((v["min_over_grid"].as_f64().unwrap() - 0.25).abs() < 1e-9);

    let tracked = shadowlab(&[
        "check",
        "inverse",
        "--system",
        "cat",
        "--method",
        "perturb:shear-sin:0.001",
        "--x",
        "0.2,0.3",
        "--eps",
        "0.1",
        "--N",
        "30",
    ]);
    assert_eq!(code(&tracked), 0);

    let orbital = shadowlab(&[
        "check",
        "orbital",
        "--system",
        "rotation:0.6180339887498949",
        "--method",
        "rotation:+0.001",
        "--x",
        "0",
        "--eps",
        "0.1",
        "--N",
        "1000",
    ]);
    assert_eq!(code(&orbital), 0);

    let bad = shadowlab(&[
        "check", "sideways", "--system", "cat", "--x", "0,0", "--eps", "0.1", "--N", "5",
    ]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn experiment_reports() {
    let out = shadowlab(&["experiment", "prop33"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["conclusion"], "consistent-with-paper");

    let out = shadowlab(&["experiment", "theorem-gallery"]);
    assert_eq!(code(&out), 0);
    let matrix = json(&out)["matrix"].clone();
    let rows = matrix.as_object().expect("matrix keyed by system");
    assert_eq!(rows.len(), 3);
    for row in rows.values() {
        for property in ["inverse", "weak", "orbital"] {
            assert!(row[property].is_string(), "missing {property} in {row}");
        }
    }

    assert_eq!(code(&shadowlab(&["experiment", "nosuch"])), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_shadowlab"))
            .args(["experiment", "prop34"])
            .env("SHADOWLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let many = run("4");
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn outputs_and_orbit_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let dumps = dir.path().join("orbits");
    let out = shadowlab(&[
        "experiment",
        "rotation-dichotomy",
        "--out",
        report.to_str().unwrap(),
        "--dump-orbits",
        dumps.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["name"], "rotation-dichotomy");
    let files: Vec<_> = fs::read_dir(&dumps).unwrap().collect();
    assert!(!files.is_empty());
    for entry in files {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        assert!(text.lines().count() > 1);
    }
}

#[test]
fn gallery_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("gallery.json");
    fs::write(
        &config,
        r#"{
            "systems": [
                {"name": "cat", "system": {"kind": "linear", "matrix": [[2, 1], [1, 1]]},
                 "method": {"kind": "linear", "matrix": [[2, 1], [1, 1]]}, "expect": {"inverse": "tracked", "weak": "tracked", "orbital": "tracked"}}
            ],
            "eps": 0.1,
            "N": 10,
            "grid": 64
        }"#,
    )
    .unwrap();
    let out = shadowlab(&["experiment", "theorem-gallery", "--config", config.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["matrix"].as_object().unwrap().len(), 1);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    fs::write(&config, "{ not json").unwrap();
    let out = shadowlab(&["experiment", "theorem-gallery", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}
