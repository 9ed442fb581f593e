//! End-to-end runs of the `crspin` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crspin"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn heisenberg_run_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = config("heisenberg_m1.toml");
    for dir in [&a, &b] {
        let out = run(&["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 5, "{stdout}");
    }
    let (fa, fb) = (read_dir(&a), read_dir(&b));
    assert_eq!(fa, fb);
    let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
    for expected in ["spectra.csv", "cohomology.csv", "vanishing.json", "vanishing.txt", "kohn_dirac.mtx", "report_conformal.json"] {
        assert!(names.contains(&expected), "{expected} missing from {names:?}");
    }
}

#[test]
fn csv_headers_and_scientific_floats() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("heisenberg_m1.toml");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap(), "--check", "spectrum", "cohomology"]);
    assert!(out.status.success());
    let spectra = fs::read_to_string(tmp.path().join("spectra.csv")).unwrap();
    assert_eq!(spectra.lines().next(), Some("q,eigenvalue,multiplicity"));
    let row = spectra.lines().nth(1).unwrap();
    assert!(row.split(',').nth(1).unwrap().contains('e'), "{row}");
    let coh = fs::read_to_string(tmp.path().join("cohomology.csv")).unwrap();
    assert_eq!(coh.lines().next(), Some("q,s,dim,method,status"));
    assert!(coh.lines().skip(1).all(|l| l.ends_with(",certified") || l.ends_with(",lower-bound")));
}

#[test]
fn json_format_keeps_tables_and_reports_apart() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("torus_bundle_m2.toml");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap(), "--check", "cohomology"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("cohomology.json")).unwrap()).unwrap();
    let h1 = table["entries"].as_array().unwrap().iter().find(|e| e["q"] == 1 && e["s"] == 0 && e["method"] == "spectral").unwrap();
    assert_eq!(h1["dim"], 2);
    let report: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("report_cohomology.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["data"]["obstruction"].as_str().unwrap().starts_with("obstructed"));
}

#[test]
fn sphere_vanishing_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("sphere_m3.toml");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("vanishing.json")).unwrap()).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[1]["verdict"]["verdict"], "forced_zero");
    assert_eq!(rows[0]["verdict"]["verdict"], "extremal_exempt");
}

#[test]
fn sphere_spectrum_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config("sphere_m3.toml");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap(), "--check", "spectrum"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sphere model has no section space"));
}

#[test]
fn bad_config_names_line_and_key() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.toml");
    fs::write(&path, "[model]\nkind = \"heisenberg\"\nm = 1\n\n[tolerances]\nspectral = -1e-8\n").unwrap();
    let out = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 6") && err.contains("tolerances.spectral"), "{err}");

    fs::write(&path, "[model]\nkind = \"heisenberg\"\nm = 1\nwidth = 3\n").unwrap();
    let out = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("width"));
}
