//! Process-level behaviour of the cm-entropy binary.

use std::fs;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_cm-entropy");

#[test]
fn kernel_table_run_writes_parseable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    let cfg = dir.path().join("table.cfg");
    fs::write(
        &cfg,
        format!(
            "[ambient]\nkind = euclidean\ndim = 2\nkappa = 0\n\
             [task]\nkind = kernel-table\ntimes = 0.5\nradii = 0 1\n\
             [output]\npath = {}\nformat = csv\n",
            out.display()
        ),
    )
    .unwrap();
    let status = Command::new(BIN).arg("run").arg(&cfg).status().unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "task,config_sha256,n,kappa,t,r,value");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let value: f64 = first[6].parse().unwrap();
    // flat kernel at t = 0.5, r = 0: (4 pi t)^{-1} = 1/(2 pi)
    assert!((value - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
}

#[test]
fn malformed_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.json");
    let cfg = dir.path().join("bad.cfg");
    fs::write(
        &cfg,
        format!(
            "[task]\nkind = juggling\n[output]\npath = {}\nformat = json\n",
            out.display()
        ),
    )
    .unwrap();
    let output = Command::new(BIN).arg("run").arg(&cfg).output().unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
    assert!(!out.exists());
}

#[test]
fn failing_task_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.json");
    let cfg = dir.path().join("bad-shape.cfg");
    fs::write(
        &cfg,
        format!(
            "[shape]\nname = torus\nparams = 1.0 2.0\n\
             [task]\nkind = rigidity\n\
             [output]\npath = {}\nformat = json\n",
            out.display()
        ),
    )
    .unwrap();
    let output = Command::new(BIN).arg("run").arg(&cfg).output().unwrap();
    assert!(!output.status.success());
    assert!(!out.exists());
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let output = Command::new(BIN).arg("verify").arg("juggling").output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown suite"));
}

#[test]
fn catalog_lists_every_shape() {
    let output = Command::new(BIN).arg("catalog").output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    for name in [
        "plane", "sphere", "cylinder", "torus", "graph", "h2-in-h3",
        "geodesic-sphere-h3", "hn-in-hn1",
    ] {
        assert!(stdout.contains(name), "catalog missing {name}");
    }
}
