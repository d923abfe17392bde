use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn snod(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snod"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn snod")
}

fn config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path
}

fn summary(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn simulate_spiking_and_rest() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), "c.json", r#"{"b": 0.1}"#);
    let s = summary(&snod(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "simulate",
            "--out",
            "t.csv",
        ],
    ));
    assert!(s["metrics"]["frequency"].as_f64().unwrap() > 0.0);
    assert_eq!(s["metrics"]["polarity"], 1);
    let metrics: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    for key in [
        "spike_times",
        "period",
        "frequency",
        "z_min",
        "z_max",
        "periodic",
        "polarity",
    ] {
        assert!(metrics.get(key).is_some(), "missing {key}");
    }
    let r = rows(&dir.path().join("t.csv"));
    assert_eq!(r[0], ["t", "z", "s"]);
    assert_eq!(r.len() - 1, s["samples"].as_u64().unwrap() as usize);

    let rest = summary(&snod(dir.path(), &["simulate", "--out", "r.csv"]));
    assert_eq!(rest["metrics"]["frequency"].as_f64(), Some(0.0));
    assert_eq!(rest["metrics"]["polarity"], 0);
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        summary(&snod(
            dir.path(),
            &["simulate", "--z0", "0.3", "--t-end", "200", "--out", name],
        ));
        (
            fs::read(dir.path().join(name)).unwrap(),
            fs::read(dir.path().join(name).with_extension("json")).unwrap(),
        )
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "c.json",
        r#"{"mu0": 0.85, "b": 0.05, "sample_dt": null}"#,
    );
    let first = summary(&snod(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "simulate",
            "--out",
            "a.csv",
        ],
    ));
    let echo = config(dir.path(), "echo.json", &first["config"].to_string());
    let second = summary(&snod(
        dir.path(),
        &[
            "--config",
            echo.to_str().unwrap(),
            "simulate",
            "--out",
            "b.csv",
        ],
    ));
    assert_eq!(first["config"], second["config"]);
    assert_eq!(first["config"]["sample_dt"], Value::Null);
    assert_eq!(
        fs::read(dir.path().join("a.csv")).unwrap(),
        fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn fixed_points_rows() {
    let dir = TempDir::new().unwrap();
    summary(&snod(dir.path(), &["fixed-points", "--out", "fp.csv"]));
    let r = rows(&dir.path().join("fp.csv"));
    assert_eq!(r[0], ["z_hat", "s_hat", "trace", "det", "stability"]);
    assert_eq!(r.len(), 2);
    assert_eq!(r[1][4], "StableNode");

    let cfg = config(dir.path(), "c.json", r#"{"mu0": 1.05}"#);
    let s = summary(&snod(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "fixed-points",
            "--out",
            "fp3.csv",
        ],
    ));
    assert_eq!(s["count"], 3);
    assert_eq!(rows(&dir.path().join("fp3.csv")).len(), 4);

    let cfg = config(dir.path(), "big.json", r#"{"b": 10.0}"#);
    summary(&snod(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "fixed-points",
            "--out",
            "fp1.csv",
        ],
    ));
    let r = rows(&dir.path().join("fp1.csv"));
    assert_eq!(r.len(), 2);
    let z = f(&r[1][0]);
    assert!(z > 0.5 && z < 1.0);
}

#[test]
fn threshold_report_and_regime_exit() {
    let dir = TempDir::new().unwrap();
    let s = summary(&snod(dir.path(), &["threshold", "--out", "th.json"]));
    assert!((s["report"]["b_star"].as_f64().unwrap() - 0.0355).abs() < 0.002);
    assert_eq!(s["report"]["regime"], "HopfWindow");
    let full: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("th.json")).unwrap()).unwrap();
    assert!((full["report"]["b_star"].as_f64().unwrap() - 0.035_479_156_872_929_13).abs() < 1e-12);

    let cfg = config(dir.path(), "c.json", r#"{"mu0": 0.1}"#);
    let out = snod(
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "threshold"],
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("AlwaysStable"));
}

#[test]
fn threshold_curve_decreasing() {
    let dir = TempDir::new().unwrap();
    let s = summary(&snod(
        dir.path(),
        &["threshold-curve", "--out", "thresholds.csv"],
    ));
    assert_eq!(s["strictly_decreasing"], true);
    let r = rows(&dir.path().join("thresholds.csv"));
    assert_eq!(
        r[0],
        ["mu0", "z_star", "b_star", "z_star2", "b_star2", "regime"]
    );
    let b: Vec<f64> = r[1..].iter().map(|x| f(&x[2])).collect();
    assert_eq!(b.len(), 30);
    assert!(b.windows(2).all(|w| w[1] < w[0]));

    let cfg = config(
        dir.path(),
        "c.json",
        r#"{"mu0_min": 0.9, "mu0_max": 1.1, "mu0_steps": 3}"#,
    );
    summary(&snod(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "threshold-curve",
            "--out",
            "t2.csv",
        ],
    ));
    let r = rows(&dir.path().join("t2.csv"));
    assert_eq!(r[3][1..5], ["", "", "", ""]);
    assert_eq!(r[3][5], "SaddleOrigin");
}

#[test]
fn heatmap_full_grid() {
    let dir = TempDir::new().unwrap();
    let s = summary(&snod(
        dir.path(),
        &["sweep", "--kind", "heatmap", "--out", "hm.csv"],
    ));
    assert_eq!(s["cells"], 3600);
    let r = rows(&dir.path().join("hm.csv"));
    assert_eq!(r[0], ["mu0", "b", "frequency", "amplitude"]);
    assert_eq!(r.len(), 3601);
    // stable origin at zero input below the pitchfork
    assert_eq!(f(&r[1][2]), 0.0);
    for row in &r[1..] {
        let (freq, amp) = (f(&row[2]), f(&row[3]));
        assert!(freq >= 0.0);
        if freq > 0.0 {
            assert!(amp >= 0.05);
        }
    }
}

#[test]
fn sweeps_identical_across_job_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "c.json",
        r#"{"mu0_min": 0.8, "mu0_max": 0.9, "mu0_steps": 3, "b_min": 0.0, "b_max": 0.08, "b_steps": 5}"#,
    );
    let c = cfg.to_str().unwrap();
    let out = snod(
        dir.path(),
        &[
            "--config", c, "--jobs", "1", "--quiet", "sweep", "--kind", "heatmap", "--out", "a.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = snod(
        dir.path(),
        &[
            "--config", c, "--jobs", "4", "--quiet", "sweep", "--kind", "heatmap", "--out", "b.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(
        fs::read(dir.path().join("a.csv")).unwrap(),
        fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn fi_sweep_monotone() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "c.json",
        r#"{"fi_mu0_values": [0.82], "b_steps": 11}"#,
    );
    summary(&snod(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "sweep",
            "--kind",
            "fi",
            "--out",
            "fi.csv",
        ],
    ));
    let r = rows(&dir.path().join("fi.csv"));
    assert_eq!(r[0], ["mu0", "b", "frequency"]);
    let freq: Vec<f64> = r[1..].iter().map(|x| f(&x[2])).collect();
    assert_eq!(freq.len(), 11);
    assert_eq!(freq[0], 0.0);
    assert!(freq.windows(2).all(|w| w[1] >= w[0]));
    assert!(*freq.last().unwrap() > 0.0);
}

#[test]
fn diagram_mu0_has_pitchfork_row() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "c.json",
        r#"{"mu0_min": 0.9, "mu0_max": 1.1, "mu0_steps": 5}"#,
    );
    summary(&snod(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "sweep",
            "--kind",
            "diagram-mu0",
            "--out",
            "d.csv",
        ],
    ));
    let r = rows(&dir.path().join("d.csv"));
    assert_eq!(
        r[0],
        [
            "mu0",
            "z_hat",
            "stability",
            "cycle_zmin",
            "cycle_zmax",
            "polarity"
        ]
    );
    let pf: Vec<_> = r.iter().filter(|x| x[2] == "PF").collect();
    assert_eq!(pf.len(), 1);
    assert_eq!(f(&pf[0][0]), 1.0);
    assert!(r[1..].iter().all(|x| x.len() == 6));
}

#[test]
fn diagram_b_hopf_markers() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        dir.path(),
        "c.json",
        r#"{"b_min": -0.1, "b_max": 0.1, "b_steps": 11}"#,
    );
    summary(&snod(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "sweep",
            "--kind",
            "diagram-b",
            "--out",
            "d.csv",
        ],
    ));
    let r = rows(&dir.path().join("d.csv"));
    let h: Vec<f64> = r.iter().filter(|x| x[2] == "H").map(|x| f(&x[0])).collect();
    assert_eq!(h.len(), 2);
    assert!((h[0] + h[1]).abs() < 1e-9);
    // every envelope row has a sign-matched polarity
    for x in r[1..].iter().filter(|x| !x[5].is_empty()) {
        let b = f(&x[0]);
        assert_eq!(x[5], if b > 0.0 { "1" } else { "-1" });
    }
}

#[test]
fn nullclines_and_fold_sidecar() {
    let dir = TempDir::new().unwrap();
    let s = summary(&snod(dir.path(), &["nullclines", "--out", "n.csv"]));
    assert_eq!(s["families"], 3);
    let r = rows(&dir.path().join("n.csv"));
    assert_eq!(r[0], ["b", "z", "s_znull", "s_snull"]);
    for x in &r[1..] {
        let z = f(&x[1]);
        assert!(z.abs() < 1.0);
        assert_eq!(f(&x[3]), 16.0 * z * z * z * z);
    }
    let bs: std::collections::BTreeSet<String> = r[1..].iter().map(|x| x[0].clone()).collect();
    assert_eq!(bs.len(), 3);
    let side: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("n.json")).unwrap()).unwrap();
    let folds = side["folds"].as_array().unwrap();
    let sep = |i: usize| folds[i]["separation"].as_f64().unwrap();
    assert!(sep(2) < sep(1));

    let out = snod(
        dir.path(),
        &["nullclines", "--b", "-0.05,0.05", "--out", "m.csv"],
    );
    summary(&out);
    let side: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    let folds = side["folds"].as_array().unwrap();
    assert_eq!(
        folds[0]["z_fold_lo"].as_f64().unwrap(),
        -folds[1]["z_fold_lo"].as_f64().unwrap()
    );
}

#[test]
fn configuration_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let unknown = config(dir.path(), "u.json", r#"{"mu": 0.8}"#);
    let bad_range = config(dir.path(), "r.json", r#"{"b_min": 0.1, "b_max": 0.0}"#);
    let empty_list = config(dir.path(), "e.json", r#"{"b_list": []}"#);
    let bad_param = config(dir.path(), "p.json", r#"{"d": -1.0}"#);
    let cases: Vec<Vec<&str>> = vec![
        vec!["--config", unknown.to_str().unwrap(), "fixed-points"],
        vec![
            "--config",
            bad_range.to_str().unwrap(),
            "sweep",
            "--kind",
            "fi",
        ],
        vec!["--config", empty_list.to_str().unwrap(), "nullclines"],
        vec!["--config", bad_param.to_str().unwrap(), "threshold"],
        vec!["--config", "missing.json", "fixed-points"],
        vec!["--jobs", "0", "fixed-points"],
        vec!["sweep", "--kind", "nonsense"],
    ];
    for args in cases {
        let out = snod(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}
