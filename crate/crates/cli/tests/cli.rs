use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kppf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kppf"))
        .args(args)
        .current_dir(dir)
        .env_remove("KPPF_THREADS")
        .env_remove("KPPF_TOL_SCALE")
        .output()
        .expect("kppf runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn delta_prints_twelve_digits() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stdout(&kppf(dir.path(), &["delta", "--flow", "couette"])), "0.00833333333333\n");
    assert_eq!(stdout(&kppf(dir.path(), &["delta", "--flow", "poiseuille"])), "0.000529100529101\n");
}

#[test]
fn vstar_near_one() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&kppf(dir.path(), &["vstar", "--uc", "0.99"]));
    let vs = v["v_star"].as_f64().unwrap();
    assert!((vs - 0.01).abs() < 5e-4, "{vs}");
}

#[test]
fn sl_at_zero_k_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&kppf(dir.path(), &["eigen", "sl", "--flow", "poiseuille", "--k", "0"]));
    assert_eq!(v["lambda0"].as_f64().unwrap(), 0.0);
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = kppf(dir.path(), &["delta", "--flow", "couette", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn errors_are_structured() {
    let dir = tempfile::tempdir().unwrap();
    let o = kppf(dir.path(), &["eigen", "qevp", "--flow", "couette", "--A", "1", "--B", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "invalid_parameter");
    assert!(e["error"]["message"].as_str().unwrap().contains('B'));

    let o = kppf(dir.path(), &["speed", "--flow", "couette", "--A", "1", "--B", "1", "--uc", "0.3"]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "no_regime");
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "uc = 0.99\n# comment\n").unwrap();
    let from_cfg = json(&kppf(dir.path(), &["--config", "c.toml", "vstar"]));
    assert_eq!(from_cfg["u_c"].as_f64().unwrap(), 0.99);
    let from_flag = json(&kppf(dir.path(), &["--config", "c.toml", "vstar", "--uc", "0.9"]));
    assert_eq!(from_flag["u_c"].as_f64().unwrap(), 0.9);

    std::fs::write(dir.path().join("bad.toml"), "nonsense = 1\n").unwrap();
    assert_eq!(kppf(dir.path(), &["--config", "bad.toml", "vstar"]).status.code(), Some(2));
}

#[test]
fn poly_reaction_must_be_kpp() {
    let dir = tempfile::tempdir().unwrap();
    let o = kppf(dir.path(), &["vstar", "--uc", "0.5", "--reaction", "poly", "--poly-coeffs", "1,4,-5"]);
    assert_ne!(o.status.code(), Some(0));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "not_kpp");
}

#[test]
fn manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&kppf(
        dir.path(),
        &["eigen", "qevp", "--flow", "poiseuille", "--A", "2", "--B", "1", "--eigenfunction", "ef.csv"],
    ));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("ef_manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"][0], "eigen");
    assert!(m["artifacts"]["ef.csv"].is_string());
    assert!(m["runtime"]["wall_clock_s"].is_number());
    stdout(&kppf(dir.path(), &["replay", "ef_manifest.json", "--check"]));

    // A manifest whose recorded digest disagrees with the rerun fails the check.
    let mut m = m;
    m["artifacts"]["ef.csv"] = Value::String("0".repeat(64));
    std::fs::write(dir.path().join("t_manifest.json"), serde_json::to_string(&m).unwrap()).unwrap();
    let o = kppf(dir.path(), &["replay", "t_manifest.json", "--check"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_rejects_empty_axis() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.txt"), "target = vbar\naxis.A =\noutput = o.csv\n").unwrap();
    let o = kppf(dir.path(), &["sweep", "--grid-file", "g.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_records_point_failures_in_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.txt"), "target = vbar\naxis.flow = couette\naxis.B = 1, -1\nfixed.A = 1\n").unwrap();
    stdout(&kppf(dir.path(), &["sweep", "--grid-file", "g.txt", "--output", "o.csv"]));
    let rows = read_csv(&dir.path().join("o.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].last().unwrap(), "");
    assert_eq!(rows[1][3], "nan");
    assert_eq!(rows[1].last().unwrap(), "invalid_parameter");
}

#[test]
fn couette_fronts_outrun_poiseuille() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("g.txt"),
        "target = vbar\naxis.flow = couette, poiseuille\naxis.A = logspace(-0.3, 1, 5)\naxis.B = 0.1, 1, 10\n",
    )
    .unwrap();
    stdout(&kppf(dir.path(), &["sweep", "--grid-file", "g.txt", "--output", "fig.csv"]));
    let rows = read_csv(&dir.path().join("fig.csv"));
    assert_eq!(rows.len(), 30);
    let vbar = |r: &Vec<String>| r[5].parse::<f64>().unwrap();
    for i in 0..15 {
        assert_eq!(rows[i][2], rows[i + 15][2]);
        assert!(vbar(&rows[i]) > vbar(&rows[i + 15]), "row {i}");
    }
}

#[test]
fn interface_curves_shrink_relative_to_k() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("g.txt"),
        "target = sl\naxis.flow = couette, poiseuille\naxis.k = 0.2, 1, 5\ninterfaces = curves\n",
    )
    .unwrap();
    stdout(&kppf(dir.path(), &["sweep", "--grid-file", "g.txt", "--output", "fig.csv"]));
    let rows = read_csv(&dir.path().join("fig.csv"));
    let scaled: Vec<f64> = rows.iter().map(|r| r[7].parse().unwrap()).collect();
    for f in 0..2 {
        assert!(scaled[3 * f] > scaled[3 * f + 1] && scaled[3 * f + 1] > scaled[3 * f + 2]);
    }
    assert!(dir.path().join("curves/point_0005.csv").exists());
}

#[test]
fn validate_flags_corrupt_flow_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.txt"), "n 3\n0 0.1\n0.5 x\n").unwrap();
    let o = kppf(dir.path(), &["validate", "--flow-file", "f.txt", "--out", "report.json"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL flow_file")));
    assert_eq!(text.lines().filter(|l| l.starts_with("FAIL")).count(), 1);
    assert!(dir.path().join("report_manifest.json").exists());
}
