use std::io::Write;
use std::process::{Command, Output, Stdio};

const X: &str = "field: 2*x*y ; x^3 + 2*y^2 ; -2*y*z\n";

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_foliage"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn true_integral_exits_zero() {
    let o = run(&["verify-integral", "-"], &format!("{X}integral: (y^2 - x^3)*z^2\n"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: exact zero Lie derivative"));
}

#[test]
fn corrupted_integral_exits_one() {
    let o = run(&["verify-integral", "-"], &format!("{X}integral: (y^2 - x^3)*z^2 + x\n"));
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stderr.is_empty());
}

#[test]
fn malformed_expression_exits_two() {
    let o = run(&["verify-integral", "-"], &format!("{X}integral: (y^2 - x^3*z^2\n"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("-:2"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_key_exits_two() {
    let o = run(&["verify-integral", "-"], &format!("{X}integrl: x*z\n"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blowup_prints_reduced_function() {
    let o = run(&["blowup", "--chart", "z-axis-xtz", "-"], "function: (y^2-x^3)/x^2\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "t^2 - x\nmultiplicity: 0\n");
}

#[test]
fn chart_flag_overrides_document() {
    let o = run(&["blowup", "--chart", "z-axis-xtz", "-"], "chart: nowhere\nfunction: x*z\n");
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["blowup", "-"], "chart: nowhere\nfunction: x*z\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn type_b_pair_is_not_dicritical() {
    let o = run(&["classify-dicritical", "-"], "f: x*y ^1\ng: z ^1\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("dicritical: false\ncase: none\n"));
}

#[test]
fn json_keys_are_sorted() {
    let o = run(&["blowup", "--chart", "z-axis-xtz", "--format", "json", "-"], "function: (y^2-x^3)/x^2\n");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(v["reduced"], "t^2 - x");
}

#[test]
fn trace_csv_has_trajectory_and_drift_table() {
    let job = format!("{X}start: 0.1, 0.1, 0.1\nintegral: x*z\n");
    let o = run(&["trace", "--n-steps", "10", "--format", "csv", "-"], &job);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let (traj, drift) = text.split_once("\n\n").unwrap();
    assert_eq!(traj.lines().count(), 12);
    assert!(traj.starts_with("step,tau_re,tau_im,x_re,x_im"));
    assert!(drift.starts_with("integral,expression,max_relative_drift"));
}

#[test]
fn nonpositive_parameters_are_input_errors() {
    let job = format!("{X}start: 0.1, 0.1, 0.1\n");
    assert_eq!(run(&["trace", "--step", "0", "-"], &job).status.code(), Some(2));
    assert_eq!(run(&["trace", "--tol", "-1", "-"], &job).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("foliage-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.txt");
    let o = run(&["blowup", "--chart", "z-axis-xtz", "--out", path.to_str().unwrap(), "-"], "function: x*z\n");
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "z\nmultiplicity: 1\n");
    std::fs::remove_dir_all(dir).ok();
}
