use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn susy_damp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_susy-damp"))
        .args(args)
        .output()
        .expect("spawn susy-damp")
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn out(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn figure_two_first_row_and_metadata() {
    let dir = TempDir::new().unwrap();
    let path = out(&dir, "fig2.csv");
    assert!(susy_damp(&["figure", "2", "--out", &path]).status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# susy-damp "));
    assert!(text.contains("# config: {\"figure\":2"));
    let rows = data_rows(Path::new(&path));
    assert_eq!(rows[0], ["t", "y", "ytilde[gamma=5]", "ytilde[gamma=5/3]", "ytilde[gamma=1]"]);
    assert_eq!(rows[1][..3], ["0", "1", "-4.96"]);
    let mid: f64 = rows[1][3].parse().unwrap();
    assert!((mid + 1.3067).abs() < 1e-4);
    assert_eq!(rows[1][4], "0");
    assert_eq!(rows.len(), 1002);
}

#[test]
fn acceleration_figures_use_acceleration_columns() {
    let dir = TempDir::new().unwrap();
    let path = out(&dir, "fig5.csv");
    assert!(susy_damp(&["figure", "5", "--out", &path]).status.success());
    let rows = data_rows(Path::new(&path));
    assert_eq!(rows[0][2], "a[gamma=5]");
    assert_eq!(rows[1][2], "-248");
}

#[test]
fn figure_out_of_range_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = susy_damp(&["figure", "7", "--out", &out(&dir, "x.csv")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_critical_seed_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let path = out(&dir, "eval.csv");
    let o = susy_damp(&[
        "eval", "--beta", "1", "--omega0", "1", "--A", "1", "--B", "1", "--t0", "0", "--t1", "5",
        "--dt", "0.25", "--out", &path,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(Path::new(&path));
    assert_eq!(rows[0], ["t", "y", "dy", "d2y"]);
    assert_eq!(rows.len(), 22);
    for row in &rows[1..] {
        let t: f64 = row[0].parse().unwrap();
        let y: f64 = row[1].parse().unwrap();
        let want = (-t).exp() * (1.0 + t);
        assert!((y - want).abs() <= 1e-15 * want.max(1e-3), "t={t}");
    }
}

#[test]
fn eval_tilde_marks_rows_near_blow_up() {
    let dir = TempDir::new().unwrap();
    let path = out(&dir, "eval.csv");
    let o = susy_damp(&[
        "eval", "--beta", "0.1", "--omega0-sq", "1.01", "--amp", "1", "--phase", "0", "--gamma", "0.5",
        "--t0", "-3", "--t1", "-1", "--dt", "0.25", "--out", &path,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(Path::new(&path));
    assert_eq!(rows[0], ["t", "y", "dy", "d2y", "a", "singular"]);
    for row in &rows[1..] {
        if row[0] == "-2" {
            assert_eq!(row[1..], ["", "", "", "", "1"]);
        } else {
            assert_eq!(row[5], "0");
            assert!(row[1].parse::<f64>().unwrap().is_finite());
        }
    }
}

#[test]
fn eval_config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"beta": 0.1, "omega0-sq": 1.01, "amp": 1, "phase": 0, "t0": 0, "t1": 1, "dt": 0.5}"#,
    )
    .unwrap();
    let path = out(&dir, "eval.csv");
    let o = susy_damp(&["eval", "--config", cfg.to_str().unwrap(), "--dt", "0.25", "--out", &path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"dt\":0.25"));
    assert_eq!(data_rows(Path::new(&path)).len(), 6);

    std::fs::write(&cfg, r#"{"beta": 0.1, "omega0": 1, "amp": 1, "colour": "red"}"#).unwrap();
    let o = susy_damp(&["eval", "--config", cfg.to_str().unwrap(), "--out", &path]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_gamma_with_seed_family_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = susy_damp(&[
        "eval", "--beta", "1", "--omega0", "1", "--A", "1", "--B", "1", "--gamma", "1", "--family", "seed",
        "--out", &out(&dir, "x.csv"),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_examples() {
    let dir = TempDir::new().unwrap();
    let path = out(&dir, "sweep.csv");
    let o = susy_damp(&["sweep", "--gammas", "1,1/2,-1/4", "--metric", "blowup_time", "--out", &path]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(Path::new(&path));
    assert_eq!(rows[0], ["gamma", "blowup_time"]);
    assert_eq!(rows[1..], [["1", "-1"], ["0.5", "-2"], ["-0.25", "4"]]);

    let o = susy_damp(&[
        "sweep", "--gammas", "1,1/2,1/10", "--metric", "value_at_t", "--t", "0", "--beta", "0.1",
        "--omega0-sq", "1.01", "--amp", "1", "--phase", "0", "--out", &path,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let values: Vec<String> = data_rows(Path::new(&path))[1..].iter().map(|r| r[1].clone()).collect();
    assert_eq!(values, ["-1", "-0.5", "-0.1"]);

    let o = susy_damp(&["sweep", "--gammas", "1,0", "--metric", "blowup-time", "--out", &path]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_max_abs_matches_dense_scan() {
    let dir = TempDir::new().unwrap();
    let path = out(&dir, "sweep.csv");
    let o = susy_damp(&[
        "sweep", "--gammas", "1", "--metric", "max_abs", "--beta", "1", "--omega0", "1", "--A", "1",
        "--B", "1", "--out", &path,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got: f64 = data_rows(Path::new(&path))[1][1].parse().unwrap();
    // y~ = ((t + 1)^2 - 1/(t + 1)) e^{-t} for gamma = 1, scanned at step 1e-3.
    let want = (0..=10_000)
        .map(|i| {
            let t = i as f64 * 1e-3;
            (((t + 1.0) * (t + 1.0) - 1.0 / (t + 1.0)) * (-t).exp()).abs()
        })
        .fold(0.0, f64::max);
    assert!((got - want).abs() <= 1e-14 * want);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let path = out(&dir, "verify.json");
    let o = susy_damp(&["verify", "--scope", "riccati", "--seed", "7", "--out", &path]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let checks = report.as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true));
    assert!(checks.iter().all(|c| c["check_name"].as_str().unwrap().starts_with("riccati.")));

    let o = susy_damp(&["verify", "--scope", "everything", "--out", &path]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_io_error() {
    let o = susy_damp(&["figure", "1", "--out", "/nonexistent-dir/fig.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn blowup_prints_instant() {
    let o = susy_damp(&["blowup", "--gamma", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["t_star"], -0.5);
    assert_eq!(susy_damp(&["blowup", "--gamma", "0"]).status.code(), Some(2));
}
