// SPDX-License-Identifier: Apache-2.0
//! End-to-end behaviour of the `superwave` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn superwave(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_superwave"));
    cmd.args(args).env_remove("SUPERWAVE_THREADS");
    if let Some(t) = threads {
        cmd.env("SUPERWAVE_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_string_lossy().into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn stokes_reports_the_eckart_critical_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = superwave(&["stokes", "--out", &out_arg(dir.path())], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("stokes.json"));
    assert!(v["z_crit_re"].as_f64().unwrap().abs() < 1e-12);
    assert!((v["z_crit_im"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    // stdout carries the same document
    let stdout: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stdout, v);
}

#[test]
fn flat_and_json_config_files_agree() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("c.conf");
    let json = dir.path().join("c.json");
    std::fs::write(&flat, "# barrier\npotential.v0 = 1.5\nenergy.e = 2.5\nenergy.window = 1.8, 3.2\n").unwrap();
    std::fs::write(&json, r#"{"potential": {"v0": 1.5}, "energy": {"e": 2.5, "window": [1.8, 3.2]}}"#).unwrap();
    let a = superwave(&["stokes", "--config", &out_arg(&flat), "--out", &out_arg(&dir.path().join("a"))], None);
    let b = superwave(&["stokes", "--config", &out_arg(&json), "--out", &out_arg(&dir.path().join("b"))], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "potential.v0 = 1\npotential.v0 = 2\n").unwrap();
    let out = out_arg(dir.path());
    let cases: Vec<Vec<String>> = vec![
        vec!["stokes".into(), "--no-such-flag".into()],
        vec!["no-such-command".into()],
        vec!["stokes".into(), "--config".into(), out_arg(&bad)],
        vec!["stokes".into(), "--config".into(), out_arg(&dir.path().join("missing.json"))],
        vec!["stokes".into(), "--energy".into(), "0.5".into()],
        vec!["stokes".into(), "--eps".into(), "0.1,0.2".into()],
        vec!["stokes".into(), "--set".into(), "potential.colour=3".into()],
        vec!["stationary".into(), "--eps".into(), "0.01".into()],
        vec!["verify".into(), "--only".into(), "12".into()],
        vec!["coeffs".into(), "--orders".into(), "3..1".into()],
    ];
    for args in cases {
        let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
        a.extend(["--out", &out]);
        let o = superwave(&a, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(superwave(&["--help"], None).status.code(), Some(0));
    assert_eq!(superwave(&["verify", "--help"], None).status.code(), Some(0));
}

#[test]
fn verify_exit_status_follows_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let ok = superwave(&["verify", "--only", "8,11", "--out", &out], None);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let report = read_json(&dir.path().join("verify_report.json"));
    assert_eq!(report["checks"].as_array().unwrap().len(), 2);
    assert_eq!(report["failed"], 0);

    let forced = superwave(&["verify", "--only", "8,11", "--tolerance-scale", "0", "--out", &out], None);
    assert_eq!(forced.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&forced.stdout);
    assert!(stdout.contains("FAIL 8 plancherel-harness"), "{stdout}");
}

#[test]
fn bad_thread_count_exits_2() {
    for t in ["0", "many"] {
        assert_eq!(superwave(&["stokes"], Some(t)).status.code(), Some(2));
    }
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_bit_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = out_arg(&out);
        for args in [
            vec!["stationary", "--eps", "0.1", "--x", "-2:2:41", "--out", &o],
            vec!["evolve", "--eps", "0.2", "--field", "gauss", "--q-list", "0.9", "--out", &o],
            vec!["frame", "--eps", "0.1", "--xi", "-1:1:21", "--out", &o],
        ] {
            let r = superwave(&args, Some(threads));
            assert_eq!(r.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
        }
        dir_bytes(&out)
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "4");
    assert!(a.len() >= 5, "{:?}", a.iter().map(|f| &f.0).collect::<Vec<_>>());
    assert_eq!(a, b);
    assert_eq!(a, c);
}
