use std::path::Path;
use std::process::{Command, Output};

fn filterlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_filterlab"))
        .args(args)
        .env_remove("FILTERLAB_OUT")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn simulate_writes_header_and_rows() {
    let out = filterlab(&["simulate", "--model", "M1", "--length", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,x,y");
    assert_eq!(lines.len(), 101);
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in ["a", "b"] {
        let target = dir.path().join(run);
        let out = filterlab(&["simulate", "--seed", "11", "--out", target.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        files.push(std::fs::read(target.join("simulate.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_filterlab"))
        .args(["filter", "--length", "5"])
        .env("FILTERLAB_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("filter.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,Pi_0,Pi_1,log_Z");
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn missing_model_file_is_a_config_error() {
    let out = filterlab(&["simulate", "--model", "does/not/exist.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_model_file_is_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, corrupted_model()).unwrap();
    let out = filterlab(&["simulate", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_scenario_is_a_config_error() {
    assert_eq!(filterlab(&["stability", "--scenario", "nope"]).status.code(), Some(2));
    assert_eq!(filterlab(&["stability"]).status.code(), Some(2));
}

#[test]
fn m2_instability_verdict() {
    let out = filterlab(&["stability", "--scenario", "M2-unstable"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().last().unwrap(), "VERDICT,PASS,2.0,2.0");
}

#[test]
fn short_scenario_has_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = filterlab(&[
        "stability", "--scenario", "M1-stable", "--trials", "1", "--horizon", "10",
        "--out", dir.path().to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(dir.path().join("M1-stable.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,tv_mean,tv_median,tv_max,entropy_mean");
    assert_eq!(lines.len(), 12);
    assert!(lines[11].starts_with("VERDICT,"));
    let verdict_ok = lines[11].starts_with("VERDICT,PASS");
    assert_eq!(out.status.code(), Some(if verdict_ok { 0 } else { 1 }));
}

#[test]
fn full_m1_scenario_passes() {
    let out = filterlab(&["stability", "--scenario", "M1-stable"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().last().unwrap().starts_with("VERDICT,PASS,"));
}

#[test]
fn environment_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = filterlab(&["environment", "--horizon", "20", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for (name, header, rows) in [("beta.csv", "n,beta", 20), ("merge.csv", "n,value", 21)] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().next().unwrap(), header);
        assert_eq!(text.lines().count(), rows + 1);
    }
    assert!(dir.path().join("kernels.csv").exists());
}

#[test]
fn oracle_check_agrees() {
    let out = filterlab(&["oracle-check", "--model", "M2", "--length", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS,"));
}

#[test]
fn accept_filter_runs_one_criterion() {
    let out = filterlab(&["accept", "--filter", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "7,PASS,2.0,2.0\n");
    assert_eq!(filterlab(&["accept", "--filter", "99"]).status.code(), Some(2));
}

fn corrupted_model() -> &'static str {
    r#"
label = "corrupted"
kernel = [[0.9, 0.2], [0.1, 0.9]]
stationary = [0.5, 0.5]

[channel]
type = "finite"
m = 2
g = [[0.8, 0.2], [0.2, 0.8]]
"#
}

fn write_corrupted(dir: &Path) -> String {
    let path = dir.join("corrupted.toml");
    std::fs::write(&path, corrupted_model()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn corrupted_kernel_fails_oracle_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_corrupted(dir.path());
    let out = filterlab(&["accept", "--filter", "1", "--model", &model]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("1,FAIL,"));
}

#[test]
fn accept_summaries_are_byte_identical() {
    let first = filterlab(&["accept", "--seed", "99"]);
    let second = filterlab(&["accept", "--seed", "99"]);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    assert_eq!(stdout(&first).lines().count(), 13);
    assert_eq!(first.stdout, second.stdout);
}
