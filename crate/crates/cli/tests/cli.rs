// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use hadamult::linalg::{self, c64};
use hadamult::{codec, Channel, DiagonalChannel, HermitianMatrix};
use hadamult_cli::ExperimentReport;

fn hadamult(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadamult")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Scratch directory unique to this test binary and test name.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hadamult-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &PathBuf, file: &str, text: &str) -> String {
    let path = dir.join(file);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn nu_named_werner_holevo() {
    let out = hadamult(&["nu", "--named", "wh3", "--p", "5", "--restarts", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out)["records"][0]["value"].as_f64().unwrap();
    assert!((v - 0.574349).abs() < 1e-6, "{v}");
}

#[test]
fn nu_from_files() {
    let dir = scratch("nu");
    let id = write(&dir, "id.json", &codec::channel_to_json(&Channel::identity(3)));
    let out = hadamult(&["nu", "--channel", &id, "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["records"][0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let deph = write(&dir, "deph.json", &codec::channel_to_json(&DiagonalChannel::dephasing(3).into()));
    let out = hadamult(&["nu", "--channel", &deph, "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["records"][0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = scratch("bad");
    let garbage = write(&dir, "garbage.json", "{not json");
    let out = hadamult(&["nu", "--channel", &garbage]);
    assert_eq!(out.status.code(), Some(2));

    let bad_c = write(
        &dir,
        "bad_c.json",
        r#"{"kind":"diagonal","dim_in":2,"dim_out":2,"payload":{"rows":2,"cols":2,"data":[[1,0],[2,0],[2,0],[1,0]]}}"#,
    );
    let rho = write(&dir, "rho.json", &codec::matrix_to_json(&(linalg::identity(4) / c64(4.0, 0.0))));
    let out = hadamult(&["replay", "--channel", &bad_c, "--psi", "identity:2", "--rho", &rho]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not positive semidefinite"), "{err}");

    assert_eq!(hadamult(&["nu", "--named", "nope"]).status.code(), Some(2));
    assert_eq!(hadamult(&["wh", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(hadamult(&["nu", "--channel", "/definitely/missing.json"]).status.code(), Some(2));
}

#[test]
fn flagged_experiment_exits_1() {
    // Without iterations the factor estimates are just random starts, so the
    // injected product witness undershoots and the gap check trips.
    let out = hadamult(&[
        "mult-test", "--max-iters", "0", "--restarts", "3", "--no-basis-starts", "--instances", "5", "--p", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["summary"]["pass"], Value::Bool(false));
}

#[test]
fn replay_from_files_product_state() {
    let dir = scratch("replay");
    let phi = DiagonalChannel::new(HermitianMatrix::symmetrize(linalg::ones(2, 2))).unwrap();
    let phi = write(&dir, "phi.json", &codec::channel_to_json(&phi.into()));
    let a = linalg::identity(2) / c64(2.0, 0.0);
    let b = HermitianMatrix::from_real_diagonal(&[0.25, 0.75]);
    let rho = write(&dir, "rho.json", &codec::matrix_to_json(&linalg::kron(&a, b.as_matrix())));
    let out = hadamult(&["replay", "--channel", &phi, "--psi", "identity:2", "--rho", &rho, "--p", "2,3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&out);
    assert_eq!(rep["records"].as_array().unwrap().len(), 2);
    for r in rep["records"].as_array().unwrap() {
        for name in ["r1", "r2", "r3", "r4", "r5", "r6"] {
            assert!(r["certificate"]["residuals"][name].as_f64().unwrap() <= 1e-12);
        }
    }
}

#[test]
fn table_format_and_out_file() {
    let dir = scratch("out");
    let out = hadamult(&["--format", "table", "lt-fuzz", "--instances", "20", "--d", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("summary: 20/20 passed, PASS"), "{text}");

    let path = dir.join("report.json");
    let out = hadamult(&["lt-fuzz", "--instances", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let rep = ExperimentReport::from_json(&text).unwrap();
    assert_eq!(rep.command, "lt-fuzz");
    assert_eq!(rep.to_json(), text);
}

#[test]
fn timing_is_opt_in() {
    let plain = hadamult(&["lt-fuzz", "--instances", "5"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("wall_time_s"));
    let timed = hadamult(&["--timing", "lt-fuzz", "--instances", "5"]);
    assert!(json(&timed)["summary"]["wall_time_s"].is_number());
}

#[test]
fn mult_test_and_entropy_add_run() {
    let out = hadamult(&["mult-test", "--n", "2", "--k", "2", "--p", "2", "--instances", "3", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["records"].as_array().unwrap().len(), 3);
    let out = hadamult(&["entropy-add", "--phi", "dephase:3", "--psi", "identity:2", "--instances", "1", "--restarts", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["records"][0]["gap"].as_f64().unwrap() < 1e-10);
}
