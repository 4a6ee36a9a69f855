use std::path::Path;
use std::process::{Command, Output};

use xduct::cli::config::REFERENCE_TOML;

fn xduct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xduct"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_prints_report_json() {
    let out = xduct(&["solve", "--probe-at", "omega-m"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eta = doc["noise"]["eta"].as_f64().unwrap();
    assert!(eta > 0.0);
    assert_eq!(doc["solver"], "recursive");
    assert_eq!(doc["solution"]["ports"].as_array().unwrap().len(), 10);
    assert_eq!(doc["solution"]["t_sideband"].as_array().unwrap().len(), 4);
}

#[test]
fn dense_solve_agrees_with_recursive() {
    let eta = |extra: &[&str]| {
        let mut args = vec!["solve", "--n", "3"];
        args.extend_from_slice(extra);
        let out = xduct(&args);
        assert_eq!(out.status.code(), Some(0));
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        doc["noise"]["eta"].as_f64().unwrap()
    };
    let (a, b) = (eta(&[]), eta(&["--dense"]));
    assert!((a - b).abs() <= 1e-10 * a);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig.csv");
    let out = xduct(&[
        "sweep",
        "omega",
        "--from",
        "200e6",
        "--to",
        "800e6",
        "--points",
        "13",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "omega_hz,eta_const,S_const,eta_pd1,S_pd1,eta_pd2,S_pd2,lb_pd2,comm_resid"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 13);
    assert!(rows.iter().all(|r| r.len() == 9));
    assert_eq!(rows[0][0], 200e6);
    // crossings go to stderr
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("# S_pd1 = S_const at omega_hz"), "{err}");
}

#[test]
fn kappa_m_sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{REFERENCE_TOML}\n[sweep]\nkappa_m_from_hz = 0.1\nkappa_m_to_hz = 10.0\nkappa_m_points = 5\n");
    let cfg = write_config(dir.path(), &text);
    let out = xduct(&["sweep", "kappa-m", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kappa_m_hz,"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn tune_reaches_unity() {
    let out = xduct(&["tune", "--from", "200e6", "--to", "800e6"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["eta_minus_one"].as_f64().unwrap().abs() <= 1e-8);
    let w = doc["omega_star_hz"].as_f64().unwrap();
    assert!((w - 669.08e6).abs() < 0.1e6, "{w}");
}

#[test]
fn tune_without_sign_change_is_an_input_error() {
    let out = xduct(&["tune", "--from", "100e6", "--to", "200e6"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_and_oracle_pass_on_defaults() {
    let out = xduct(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
    let out = xduct(&["oracle", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS] recursive vs dense"));
}

#[test]
fn bad_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &REFERENCE_TOML.replace("kappa_e_ex_hz = 2.3e6", "kappa_e_ex_hz = 3.3e6"));
    let out = xduct(&["solve", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let cfg = write_config(dir.path(), &REFERENCE_TOML.replace("mode = \"parametric\"", "mode = \"pulsed\""));
    assert_eq!(xduct(&["solve", "--config", &cfg]).status.code(), Some(1));

    assert_eq!(xduct(&["solve", "--config", "/nonexistent/run.toml"]).status.code(), Some(1));
    assert_eq!(xduct(&["sweep", "sideways"]).status.code(), Some(1));
    assert_eq!(xduct(&["solve", "--n", "0"]).status.code(), Some(1));
    assert_eq!(xduct(&["--help"]).status.code(), Some(0));
}
