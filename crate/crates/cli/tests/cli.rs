use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dglab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dglab"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn volume_row_is_within_comparability() {
    let dir = tempfile::tempdir().unwrap();
    let o = dglab(dir.path(), &["volume", "--geometry", "Fks:3,0.5", "--n", "2", "--x1", "0.2", "--r", "0.015625"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("volume.csv")).unwrap();
    assert_eq!(text, stdout(&o));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "ratio").unwrap();
    let row = rdr.records().next().unwrap().unwrap();
    let ratio: f64 = row[col].parse().unwrap();
    assert!((0.125..=8.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn classify_reports_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let o = dglab(dir.path(), &["classify", "--geometry", "Fks:0,1.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("classify.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["verdict"], "convergent");
    assert_eq!(v["command"], "classify");
}

#[test]
fn classify_table_rows_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let o = dglab(dir.path(), &["classify", "--rows", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dat = fs::read_to_string(dir.path().join("classify.dat")).unwrap();
    let mut lines = dat.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    let js: Vec<f64> = lines.map(|l| l.split(' ').next().unwrap().parse().unwrap()).collect();
    assert_eq!(js.len(), 100);
    assert!(js.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn audit_names_the_failed_condition() {
    let dir = tempfile::tempdir().unwrap();
    let o = dglab(dir.path(), &["audit", "--geometry", "constant"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("condition (1)"), "{}", stderr(&o));
}

#[test]
fn numeric_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = dglab(dir.path(), &["geodesic", "--geometry", "constant"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn bad_arguments_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dglab(dir.path(), &["volume", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(dglab(dir.path(), &["volume", "--geometry", "Fks:3,-1"]).status.code(), Some(1));
    assert_eq!(dglab(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"command": "classify", "sigma": 2}"#).unwrap();
    let o = dglab(dir.path(), &["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sigma"), "{}", stderr(&o));
}

#[test]
fn config_round_trip_reproduces_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let first = dglab(&a, &["classify", "--geometry", "Fks:3,1.2", "--rows", "8", "--c2", "2"]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let json_a = fs::read_to_string(a.join("classify.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json_a).unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, v["config"].to_string()).unwrap();
    let second = dglab(&b, &["--config", cfg.to_str().unwrap(), "classify"]);
    assert_eq!(second.status.code(), Some(0), "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(json_a, fs::read_to_string(b.join("classify.json")).unwrap());
    assert_eq!(fs::read(a.join("classify.dat")).unwrap(), fs::read(b.join("classify.dat")).unwrap());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dglab"))
        .env("DGLAB_OUT_DIR", dir.path())
        .args(["kernel", "--geometry", "Dsigma:0.5", "--n", "3", "--x1", "0.05", "--r", "0.0625"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("kernel.json").exists());
}

#[test]
fn oscillation_writes_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let o = dglab(dir.path(), &["oscillation", "--levels", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dat = fs::read_to_string(dir.path().join("oscillation.dat")).unwrap();
    let lines: Vec<&str> = dat.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "# r osc");
    let osc: Vec<f64> = lines[1..].iter().map(|l| l.split(' ').nth(1).unwrap().parse().unwrap()).collect();
    assert!(osc.windows(2).all(|w| w[1] < w[0]), "{osc:?}");
}

#[test]
fn suite_exit_status_follows_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let pass = dglab(dir.path(), &["suite", "--criteria", "4"]);
    assert_eq!(pass.status.code(), Some(0), "{}", stdout(&pass));
    assert!(stdout(&pass).contains("criterion  4 PASS"));
    assert!(dir.path().join("suite.json").exists());
    let fail = dglab(dir.path(), &["suite", "--criteria", "2"]);
    assert_eq!(fail.status.code(), Some(2), "{}", stdout(&fail));
    assert!(stdout(&fail).contains("criterion  2 FAIL"));
}
