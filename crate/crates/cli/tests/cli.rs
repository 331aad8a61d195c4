use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;
use sha2::{Digest, Sha256};

fn hlp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

/// Checks every file in `dir` is in the manifest with the right hash.
fn check_manifest(dir: &Path) -> Value {
    let manifest = read_json(&dir.join("manifest.json"));
    let listed: BTreeSet<String> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let path = e["path"].as_str().unwrap();
            let digest = hex::encode(Sha256::digest(fs::read(dir.join(path)).unwrap()));
            assert_eq!(e["sha256"].as_str().unwrap(), digest, "{path}");
            path.to_string()
        })
        .collect();
    let on_disk: BTreeSet<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    assert_eq!(listed, on_disk);
    let config_hash = hex::encode(Sha256::digest(fs::read(dir.join("config.json")).unwrap()));
    assert_eq!(manifest["config_sha256"].as_str().unwrap(), config_hash);
    manifest
}

#[test]
fn defect_of_annihilated_data() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hlp(&["defect", "--output-dir", "d"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("d/defect.json"));
    assert!(report["fredholm_defect"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["in_X0"], Value::Bool(true));
    check_manifest(&tmp.path().join("d"));

    let out = hlp(&["defect", "--data", "gaussian", "--output-dir", "g"], tmp.path());
    assert!(out.status.success());
    let report = read_json(&tmp.path().join("g/defect.json"));
    assert_eq!(report["in_X0"], Value::Bool(false));
}

#[test]
fn eps_scan_of_the_delta_matches_c_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hlp(&["eps-scan", "--grid-preset", "small", "--alpha", "1", "--output-dir", "e"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("e");
    let summary = read_json(&dir.join("summary.json"));
    let results = &summary["results"];
    assert!((results["c_alpha"].as_f64().unwrap() - PI / 2.0).abs() < 1e-12);
    assert!((results["compensator_ratio"].as_f64().unwrap() - 1.0).abs() <= 0.05);
    assert_eq!(results["slope"]["verdict"], "pass");
    // Defaults are echoed.
    assert_eq!(summary["config"]["command"]["annulus"], "full");
    assert_eq!(summary["config"]["command"]["ladder"].as_array().unwrap().len(), 7);
    let csv = fs::read_to_string(dir.join("eps_scan.csv")).unwrap();
    assert!(csv.starts_with("eps,I,compensator,difference,ratio\n"));
    check_manifest(&dir);
}

#[test]
fn selftest_passes_quickly() {
    let tmp = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let out = hlp(&["selftest", "--output-dir", "s"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(start.elapsed().as_secs_f64() < 60.0);
    let report = read_json(&tmp.path().join("s/selftest.json"));
    assert_eq!(report["passed"], Value::Bool(true));
    check_manifest(&tmp.path().join("s"));
}

#[test]
fn outputs_are_hash_stable_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut manifests = Vec::new();
    for (dir, threads) in [("a", "1"), ("b", "4"), ("c", "4")] {
        let out = Command::new(env!("CARGO_BIN_EXE_hlp"))
            .args(["knapp-scan", "--grid-preset", "small", "--output-dir", "out"])
            .env("RAYON_NUM_THREADS", threads)
            .current_dir({
                let d = tmp.path().join(dir);
                fs::create_dir(&d).unwrap();
                d
            })
            .output()
            .unwrap();
        assert!(out.status.success());
        manifests.push(fs::read(tmp.path().join(dir).join("out/manifest.json")).unwrap());
        check_manifest(&tmp.path().join(dir).join("out"));
    }
    assert_eq!(manifests[0], manifests[1]);
    assert_eq!(manifests[1], manifests[2]);
}

#[test]
fn config_round_trips_through_json() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hlp(
        &["kernel-profile", "--grid-preset", "small", "--order-re", "0.5", "--output-dir", "k", "--dry-run"],
        tmp.path(),
    );
    assert!(out.status.success());
    let first = out.stdout.clone();
    let cfg: Value = serde_json::from_slice(&first).unwrap();
    // Fully resolved: explicit grid, radii filled in.
    assert_eq!(cfg["grid"]["N"], 256);
    assert!((cfg["grid"]["L"].as_f64().unwrap() - 32.0 * PI).abs() < 1e-12);
    assert!(cfg["grid"].get("preset").is_none());
    assert!(!cfg["command"]["radii"].as_array().unwrap().is_empty());
    assert_eq!(cfg["command"]["order_re"], 0.5);

    fs::write(tmp.path().join("cfg.json"), &first).unwrap();
    let again = hlp(&["run", "cfg.json", "--dry-run"], tmp.path());
    assert!(again.status.success());
    assert_eq!(first, again.stdout);

    // Running the file reproduces the config byte for byte.
    let run = hlp(&["run", "cfg.json"], tmp.path());
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(fs::read(tmp.path().join("k/config.json")).unwrap(), first);
    check_manifest(&tmp.path().join("k"));
}

#[test]
fn preset_in_a_config_file_is_resolved() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"command": {"name": "lq-scan", "beta": 0.7, "alpha": 0.7}, "grid": {"preset": "small"}}"#;
    fs::write(tmp.path().join("cfg.json"), cfg).unwrap();
    let out = hlp(&["run", "cfg.json", "--dry-run"], tmp.path());
    assert!(out.status.success());
    let resolved: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(resolved["grid"]["n"], 2);
    assert_eq!(resolved["grid"]["N"], 256);
    assert_eq!(resolved["command"]["deltas"].as_array().unwrap().len(), 5);
    assert_eq!(resolved["output_dir"], "hlp-output");
}

#[test]
fn solve_reads_its_own_field_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hlp(&["solve", "--grid-preset", "small", "--output-dir", "s"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let diag = read_json(&tmp.path().join("s/diagnostics.json"));
    assert_eq!(diag["converged"], Value::Bool(true));
    assert!(diag["residual"].as_f64().unwrap() < 1e-8);

    // The written data feeds back in; the file's grid wins over the default.
    let out = hlp(&["defect", "--input", "s/f.fld", "--grid-preset", "paper2d", "--output-dir", "d"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_json(&tmp.path().join("d/summary.json"));
    assert_eq!(summary["config"]["grid"]["N"], 256);
    assert_eq!(summary["results"]["in_X0"], Value::Bool(true));
}

#[test]
fn exit_codes_and_error_json() {
    let tmp = tempfile::tempdir().unwrap();

    // Config errors.
    let out = hlp(&["defect", "--points", "100", "--output-dir", "x"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "BadGrid");
    assert_eq!(err["exit_code"], 2);
    fs::write(tmp.path().join("bad.json"), r#"{"command": {"name": "defect", "bogus": 1}}"#).unwrap();
    let out = hlp(&["run", "bad.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "Config");
    let out = hlp(&["eps-scan", "--grid-preset", "small", "--alpha", "2", "--output-dir", "x"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "AlphaOutOfRange");

    // Numerical failure keeps the diagnostics and the manifest.
    let out = hlp(&["solve", "--grid-preset", "small", "--data", "gaussian", "--output-dir", "nc"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "NoConvergence");
    let diag = read_json(&tmp.path().join("nc/diagnostics.json"));
    assert_eq!(diag["converged"], Value::Bool(false));
    assert!(!tmp.path().join("nc/summary.json").exists());
    check_manifest(&tmp.path().join("nc"));

    let out = hlp(
        &["perturbed-solve", "--potential-strength", "200", "--output-dir", "pc"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "NoContraction");

    // I/O and format errors.
    let out = hlp(&["defect", "--input", "missing.fld", "--output-dir", "x"], tmp.path());
    assert_eq!(out.status.code(), Some(4));
    fs::write(tmp.path().join("junk.fld"), b"not a field file").unwrap();
    let out = hlp(&["defect", "--input", "junk.fld", "--output-dir", "x"], tmp.path());
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"], "Format");
    let out = hlp(&["run", "missing.json"], tmp.path());
    assert_eq!(out.status.code(), Some(4));
}
