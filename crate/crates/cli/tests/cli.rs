//! End-to-end tests of the `rclab` binary: exit codes, artifact layout,
//! and byte-level reproducibility.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

use rclab::config::RunConfig;
use rclab::report::{render_json, REPORT_SCHEMA};

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

/// Fresh scratch directory under the system temp dir; unique per test.
fn scratch(tag: &str) -> PathBuf {
    let n = DIR_SEQ.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!(
        "rclab-test-{}-{tag}-{n}",
        std::process::id()
    ));
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    dir
}

fn rclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rclab"))
        .args(args)
        .env_remove("RCLAB_OUT")
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn audit_duality_exact_example_reports_zero_slack() {
    let dir = scratch("duality");
    let out = rclab(&[
        "audit", "duality", "--k", "2", "--m", "1", "--q", "1", "--p", "0.5", "--exact", "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(out.status.code(), Some(0));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("audit.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], REPORT_SCHEMA);
    assert_eq!(report["name"], "duality");
    assert_eq!(report["slack"].as_f64().unwrap(), 0.0);
    assert_eq!(report["holds"], true);

    // The written report renders with the library entry point too.
    let rendered = render_json(&fs::read_to_string(dir.join("audit.json")).unwrap()).unwrap();
    assert!(rendered.contains("slack"), "{rendered}");

    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("slack"), "{stdout}");
    assert!(stdout.contains("holds"), "{stdout}");

    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn invalid_q_exits_two_and_names_the_field() {
    let out = rclab(&[
        "scan", "rc", "--q", "0", "--grid", "0.4:0.6:3", "--boxes", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("q must be positive"), "stderr: {err}");
}

#[test]
fn malformed_grid_exits_two() {
    let out = rclab(&["scan", "rc", "--q", "1", "--grid", "nope", "--boxes", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_row_count_is_grid_times_boxes() {
    let dir = scratch("scan-rows");
    let out = rclab(&[
        "scan", "rc", "--q", "2", "--grid", "0.50:0.67:18", "--boxes", "4,8", "--chains", "1",
        "--sweeps", "16", "--burnin", "2", "--seed", "3", "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    let csv = fs::read_to_string(dir.join("scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "control,k,m,mean,stderr,n,seed,version");
    assert_eq!(lines.len(), 1 + 36, "18-point grid x 2 boxes");
    // Box-major order: first 18 rows are the k=4 box, then the k=8 box.
    assert!(lines[1].starts_with("0.5,4,3,"), "{}", lines[1]);
    assert!(lines[19].starts_with("0.5,8,7,"), "{}", lines[19]);
    assert!(lines[36].contains(",8,7,"), "{}", lines[36]);

    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn identical_config_gives_byte_identical_artifacts() {
    let args = |dir: &str| {
        vec![
            "scan", "rc", "--q", "1.5", "--grid", "0.45:0.6:4", "--boxes", "2,3", "--chains",
            "2", "--sweeps", "40", "--burnin", "5", "--seed", "11", "--out", dir,
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()
    };
    let d1 = scratch("repro-a");
    let d2 = scratch("repro-b");
    for d in [&d1, &d2] {
        let a = args(d.to_str().unwrap());
        let out = rclab(&a.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    }
    let csv1 = fs::read(d1.join("scan.csv")).unwrap();
    let csv2 = fs::read(d2.join("scan.csv")).unwrap();
    assert_eq!(csv1, csv2, "scan CSV must be byte-identical across runs");

    let json1 = fs::read(d1.join("scan.json")).unwrap();
    let json2 = fs::read(d2.join("scan.json")).unwrap();
    assert_eq!(json1, json2);

    // The stored config parses back and differs only in the out path.
    let c1 = RunConfig::from_json(&fs::read_to_string(d1.join("config.json")).unwrap()).unwrap();
    let c2 = RunConfig::from_json(&fs::read_to_string(d2.join("config.json")).unwrap()).unwrap();
    assert_eq!(c1.command, c2.command);
    assert_ne!(c1.out, c2.out);

    fs::remove_dir_all(&d1).unwrap();
    fs::remove_dir_all(&d2).unwrap();
}

#[test]
fn enumerate_single_edge_writes_closed_form_row() {
    let dir = scratch("enumerate");
    let out = rclab(&[
        "enumerate", "rc", "--k", "1", "--m", "0", "--p", "0.3", "--q", "2", "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let csv = fs::read_to_string(dir.join("enumerate.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let mean: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((mean - 0.3 / (0.3 + 0.7 * 2.0)).abs() < 1e-15, "{row}");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn env_var_supplies_default_output_directory() {
    let dir = scratch("envout");
    let out = Command::new(env!("CARGO_BIN_EXE_rclab"))
        .args(["enumerate", "rc", "--k", "2", "--m", "1", "--p", "0.5", "--q", "1"])
        .env("RCLAB_OUT", &dir)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(dir.join("enumerate.csv").exists());
    assert!(dir.join("config.json").exists());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sample_command_reports_estimate_with_stderr() {
    let out = rclab(&[
        "sample", "rc", "--k", "2", "--m", "1", "--p", "0.6", "--q", "2", "--chains", "2",
        "--sweeps", "64", "--burnin", "8", "--seed", "5",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("control"), "{stdout}");
    // Two lines: header plus the single row.
    assert_eq!(stdout.lines().count(), 3, "{stdout}");
}

#[test]
fn audit_lemma_and_corollary_run_from_cli() {
    let out = rclab(&[
        "audit", "lemma", "--k", "1", "--m", "1", "--n", "1", "--p", "0.35", "--q", "1.5",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));

    let out = rclab(&[
        "audit", "corollary", "--k", "2", "--m", "1", "--q", "2", "--grid", "0.45:0.55:5",
        "--c", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
}

#[test]
fn mc_duality_audit_agrees_within_tolerance() {
    let out = rclab(&[
        "audit", "duality", "--k", "2", "--m", "1", "--q", "2", "--p", "0.55", "--seed",
        "20260823", "--chains", "2", "--sweeps", "1500", "--burnin", "150",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("pooled_stderr"), "{stdout}");
}
