use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greenosher"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_example_pair() {
    let dir = TempDir::new().unwrap();
    let k = write(
        &dir,
        "k.json",
        r#"{"version": 1, "a0": 1, "cos": [0, 0.2]}"#,
    );
    let l = write(&dir, "l.json", r#"{"version": 1, "a0": 1}"#);
    let report = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--k",
        s(&k),
        "--l",
        s(&l),
        "--functional",
        "square",
        "--report",
        s(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&report);
    let f = &r["functionals"][0];
    assert_eq!(f["name"], "square");
    assert!((f["slack"].as_f64().unwrap() - 0.24).abs() < 1e-9);
    assert!((f["lhs"].as_f64().unwrap() - 2.36).abs() < 1e-9);
    assert!((f["rhs"].as_f64().unwrap() - 2.12).abs() < 1e-9);
    for key in [
        "steiner",
        "certificate",
        "partition",
        "rho1_bound",
        "b_bound",
        "homothetic",
        "residual",
    ] {
        assert!(!r[key].is_null(), "missing {key}");
    }
    assert_eq!(r["homothetic"], false);
    assert!((r["certificate"]["r"].as_f64().unwrap() - 0.8).abs() < 1e-9);
    assert!((r["certificate"]["R"].as_f64().unwrap() - 1.2).abs() < 1e-9);
}

#[test]
fn verify_homothetic_pair() {
    let dir = TempDir::new().unwrap();
    let l = write(
        &dir,
        "l.json",
        r#"{"version": 1, "a0": 1, "cos": [0.3, 0.1], "sin": [0, 0, 0.02]}"#,
    );
    let k = write(
        &dir,
        "k.json",
        r#"{"version": 1, "a0": 2, "cos": [-0.5, 0.2], "sin": [1, 0, 0.04]}"#,
    );
    let report = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--k",
        s(&k),
        "--l",
        s(&l),
        "--functional",
        "all",
        "--tol",
        "1e-9",
        "--report",
        s(&report),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&report);
    assert_eq!(r["homothetic"], true);
    let functionals = r["functionals"].as_array().unwrap();
    assert_eq!(functionals.len(), 5);
    for f in functionals {
        assert!(f["slack"].as_f64().unwrap().abs() < 1e-9, "{f}");
    }
}

#[test]
fn bad_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", r#"{"version": 1, "a0": 1}"#);
    let malformed = write(&dir, "bad.json", "{\"version\": 1, \"a0\": ");
    let concave = write(
        &dir,
        "concave.json",
        r#"{"version": 1, "a0": 1, "cos": [0, 0.5]}"#,
    );
    let report = dir.path().join("report.json");
    for k in [&malformed, &concave, &dir.path().join("missing.json")] {
        let out = run(&[
            "verify",
            "--k",
            s(k),
            "--l",
            s(&good),
            "--report",
            s(&report),
        ]);
        assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run(&[
        "verify",
        "--k",
        s(&good),
        "--l",
        s(&good),
        "--functional",
        "cube",
        "--report",
        s(&report),
    ]);
    assert_eq!(code(&out), 2);
    let out = run(&["verify", "--k", s(&good)]);
    assert_eq!(code(&out), 2);
    let out = run(&[
        "plot",
        "--k",
        s(&malformed),
        "--l",
        s(&good),
        "--out",
        s(&dir.path().join("x.svg")),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sweep_summaries() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.json");
    let out = run(&[
        "sweep",
        "--trials",
        "0",
        "--seed",
        "3",
        "--degree",
        "4",
        "--summary",
        s(&empty),
    ]);
    assert_eq!(code(&out), 0);
    let summary = json(&empty);
    assert_eq!(summary["trials"], 0);
    assert_eq!(summary["failures"], 0);
    assert_eq!(summary["failed_seeds"].as_array().unwrap().len(), 0);

    let paths: Vec<PathBuf> = (0..3)
        .map(|i| dir.path().join(format!("s{i}.json")))
        .collect();
    for (path, jobs) in paths.iter().zip(["1", "1", "2"]) {
        let out = run(&[
            "sweep",
            "--trials",
            "3",
            "--seed",
            "5",
            "--degree",
            "6",
            "--functional",
            "all",
            "--jobs",
            jobs,
            "--summary",
            s(path),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let bytes: Vec<Vec<u8>> = paths.iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[0], bytes[2]);
    let summary = json(&paths[0]);
    assert_eq!(summary["trials"], 3);
    assert_eq!(summary["min_slack"].as_object().unwrap().len(), 5);
    assert!(summary["min_rho1_bound"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn gen_info_and_plot() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = run(&[
            "gen",
            "--degree",
            "5",
            "--seed",
            "9",
            "--decay",
            "2.5",
            "--out",
            s(path),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let body = json(&a);
    assert_eq!(body["version"], 1);
    assert_eq!(body["cos"][0], 0.0);

    let disk = write(&dir, "disk.json", r#"{"version": 1, "a0": 1}"#);
    let out = run(&["info", "--k", s(&a), "--l", s(&disk)]);
    assert_eq!(code(&out), 0);
    let info: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(info["area"].as_f64().unwrap() > 0.0);
    assert!(info["steiner"]["t1"].as_f64().unwrap() < 0.0);

    let svg = dir.path().join("pair.svg");
    let out = run(&[
        "plot",
        "--k",
        s(&a),
        "--l",
        s(&disk),
        "--out",
        s(&svg),
        "--rho",
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<svg") && text.contains("id=\"rho\"") && text.contains("id=\"origin\""));
}
