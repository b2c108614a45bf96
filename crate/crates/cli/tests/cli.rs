//! End-to-end runs of the binary: artifact schemas, exit codes, overrides,
//! and byte-level determinism.  Cutoffs are kept small so the whole file
//! stays in test-suite territory rather than benchmark territory.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadtwist"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn density_writes_breakdown_and_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(&["density", "--X", "200,400", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let report = json(dir, "density_breakdown.json");
    assert_eq!(report["x"], 400);
    assert_eq!(report["sigma"], 0.5);
    let hash = report["config_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
    assert!(report["version"].as_str().unwrap().contains('.'));
    assert!(report["family_size"].as_u64().unwrap() > 0);
    assert!(report["identity_residual"].as_f64().unwrap().abs() < 1e-9);
    let breakdown = &report["breakdown"];
    for field in [
        "gamma_term",
        "conductor_even",
        "good_prime_even",
        "divisor_even",
        "conductor_odd",
        "good_prime_odd_remainder",
        "total_closed",
        "total_direct",
        "envelope",
    ] {
        assert!(breakdown[field].is_number(), "missing {field}");
    }

    let sweep = read(dir, "density_sweep.csv");
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("x,family_size,gamma_term"));
    assert!(lines[1].starts_with("200,"));
    assert!(lines[2].starts_with("400,"));
}

#[test]
fn rejects_sigma_outside_the_unit_interval() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "density",
        "--X",
        "200",
        "--sigma",
        "1.2",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("sigma"));
}

#[test]
fn config_file_seeds_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let config = dir.join("run.json");
    std::fs::write(&config, r#"{"x": [200], "sigma": 0.5}"#).unwrap();
    let out = run(&[
        "density",
        "--config",
        config.to_str().unwrap(),
        "--X",
        "300",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let sweep = read(dir, "density_sweep.csv");
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines.len(), 2, "flag grid replaces the config grid");
    assert!(lines[1].starts_with("300,"));

    std::fs::write(&config, r#"{"bogus": 1}"#).unwrap();
    let out = run(&["density", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("config"));
}

#[test]
fn ratios_comparison_shares_rows_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(&[
        "ratios",
        "--X",
        "1000",
        "--prime-limit",
        "300",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let table = read(dir, "nt_vs_ratios.csv");
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 8);
    assert_eq!(lines[0], "term,nt_value,ratios_value,difference");
    for shared in &lines[1..6] {
        assert!(shared.ends_with(",0"), "shared row drifted: {shared}");
    }
    assert!(lines[6].starts_with("central_kernel,"));
    assert!(lines[7].starts_with("total,"));

    let report = json(dir, "ratios_breakdown.json");
    assert_eq!(report["prime_limit"], 300);
    assert!(report["breakdown"]["total"].is_number());
    assert!(report["breakdown"]["ae_oscillatory"].is_number());
}

#[test]
fn charsum_grid_covers_the_default_cells() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(&["charsum", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let grid = read(dir, "charsum_grid.csv");
    let lines: Vec<&str> = grid.lines().collect();
    assert_eq!(lines.len(), 13, "2 N values x 3 moduli x 2 cutoffs");
    assert_eq!(lines[0], "N,M,X,S,S1,S2,ratio,fitted_exponent");
    for row in &lines[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 8);
        assert!(!fields[7].is_empty(), "missing fit in {row}");
    }
}

#[test]
fn charsum_rejects_a_squarefull_modulus() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["charsum", "--M", "9", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("squarefree"));
}

#[test]
fn charsum_rejects_an_unknown_residue_side() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "charsum",
        "--side",
        "diagonal",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("residue side"));
}

#[test]
fn census_tracks_the_main_term() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(&[
        "census",
        "--X",
        "1000,4000",
        "--M",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = read(dir, "census.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    for row in &lines[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        let normalized: f64 = fields[5].parse().unwrap();
        assert!(normalized.abs() < 5.0, "count far from the main term: {row}");
    }
}

#[test]
fn identical_configs_produce_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = run(&["density", "--X", "300", "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for name in ["density_breakdown.json", "density_sweep.csv"] {
        let left = std::fs::read(a.join(name)).unwrap();
        let right = std::fs::read(b.join(name)).unwrap();
        assert_eq!(left, right, "{name} differs between runs");
    }
}

#[test]
fn exports_mark_the_conductor_row() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = run(&[
        "density",
        "--X",
        "200",
        "--export-hecke",
        "--export-family",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let hecke = read(dir, "hecke.csv");
    assert!(hecke.starts_with("p,a_p,lambda\n"));
    assert!(hecke.contains("\n11,,\n"), "conductor row keeps a_p blank");
    let family = read(dir, "family.csv");
    assert!(family.lines().count() > 10);
    for row in family.lines().skip(1) {
        let d: u64 = row.split(',').next().unwrap().parse().unwrap();
        assert!(d > 1 && d <= 200);
    }
}

#[test]
fn narrow_support_still_converges() {
    // windows commensurate with the kernel period keep the tail clean
    // away from sigma = 1/2
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "density",
        "--X",
        "2000",
        "--sigma",
        "0.4",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}
