//! End-to-end checks of the command-line harness: output determinism,
//! config overlay, usage errors and manifest verification.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypsurf"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hypsurf-cli-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn pants_prints_seam_lengths() {
    let out = bin()
        .args(["pants", "--half-lengths", "1,1,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("seam(1,2) = 1.704912832"), "{text}");
}

#[test]
fn pants_fixed_point_value() {
    let c = (2.0 + 3.0f64.sqrt()).ln();
    let out = bin()
        .args(["pants", "--half-lengths", &format!("{c},{c},{c}")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // delta_l = l at the fixed point.
    assert!(text.contains("seam(1,2) = 1.316957897"), "{text}");
}

#[test]
fn missing_required_flag_fails_with_usage() {
    let out = bin().args(["pants"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.to_lowercase().contains("usage"), "{err}");
}

#[test]
fn experiment_commands_require_a_seed() {
    let dir = tmp("noseed");
    let out = bin()
        .args(["alpha", "--r-grid", "2,4", "--trials", "4", "--length", "pm:2.0"])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("seed"), "{err}");
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn same_seed_gives_identical_csv_bytes() {
    let a = tmp("det-a");
    let b = tmp("det-b");
    for dir in [&a, &b] {
        let out = bin()
            .args([
                "alpha",
                "--length",
                "pm:2.0",
                "--twist",
                "uniform",
                "--r-grid",
                "2,4",
                "--trials",
                "6",
                "--m",
                "6",
                "--seed",
                "99",
            ])
            .args(["--out", dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read(&a, "alpha_grid.csv"), read(&b, "alpha_grid.csv"));
    assert_eq!(read(&a, "alpha_summary.csv"), read(&b, "alpha_summary.csv"));
    // A different seed changes the results.
    let c = tmp("det-c");
    let out = bin()
        .args([
            "alpha", "--length", "pm:2.0", "--twist", "uniform", "--r-grid", "2,4",
            "--trials", "6", "--m", "6", "--seed", "100",
        ])
        .args(["--out", c.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_ne!(read(&a, "alpha_grid.csv"), read(&c, "alpha_grid.csv"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tmp("cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        "length = pm:2.0\ntwist = uniform\nr_grid = 2,4\ntrials = 6\nm = 6\nseed = 21\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args(["--config", cfg.to_str().unwrap()])
        .args(["alpha", "--out", out_dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&String::from_utf8(read(&out_dir, "manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 21);
    // Flag overrides the config seed.
    let out_dir2 = dir.join("out2");
    let out = bin()
        .args(["--config", cfg.to_str().unwrap()])
        .args(["alpha", "--seed", "22", "--out", out_dir2.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&String::from_utf8(read(&out_dir2, "manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["master_seed"], 22);
}

#[test]
fn gen_emits_parseable_records_and_report_verifies() {
    let dir = tmp("gen");
    let out = bin()
        .args([
            "gen", "--genus", "3", "--length", "uniform:1.5,3.0", "--twist", "uniform",
            "--count", "2", "--seed", "5", "--dump-metric",
        ])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record = String::from_utf8(read(&dir, "surface-0000.txt")).unwrap();
    let g = hypsurf::surface::deserialize(&record).unwrap();
    assert_eq!(g.genus(), 3);
    assert!(!String::from_utf8(read(&dir, "metric-0000.txt")).unwrap().is_empty());

    let out = bin().args(["report", "--dir", dir.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1/1 manifests verified"), "{text}");

    // Corrupting a result file must fail verification.
    std::fs::write(dir.join("surfaces.csv"), "tampered").unwrap();
    let out = bin().args(["report", "--dir", dir.to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn explore_trace_and_growth_emit_expected_columns() {
    let dir = tmp("explore");
    let out = bin()
        .args([
            "explore", "--mode", "trace", "--genus", "6", "--trials", "2",
            "--m", "6", "--seed", "7",
        ])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = String::from_utf8(read(&dir, "trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert!(lines.next().unwrap().starts_with("# config "));
    assert_eq!(
        lines.next().unwrap(),
        "trial,step,selected,partner,bad,d_plus,discovered"
    );
    assert!(lines.next().unwrap().starts_with("0,0,"));

    let gdir = tmp("growth");
    let out = bin()
        .args([
            "growth", "--length", "pm:2.0", "--twist", "uniform", "--r-grid", "2,4",
            "--trials", "4", "--m", "6", "--seed", "3",
        ])
        .args(["--out", gdir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(read(&gdir, "growth_summary.csv")).unwrap();
    assert!(summary.lines().last().unwrap().ends_with(",0"), "{summary}");
    for name in ["growth.csv", "concentration_histogram.csv", "goodset.csv", "systole.csv"] {
        assert!(gdir.join(name).exists(), "missing {name}");
    }
}
