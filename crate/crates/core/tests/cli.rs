use lapspec::cvec::cr;
use lapspec::{Domain, FunctionDescriptor};
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lapspec"))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("lapspec-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write_func(dir: &std::path::Path, phi: &FunctionDescriptor) -> String {
    let p = dir.join("func.json");
    std::fs::write(&p, phi.to_json()).unwrap();
    p.to_str().unwrap().to_string()
}

fn rows_with(out: &Output, class: &str) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("omega"))
        .filter(|l| l.split(',').nth(2) == Some(class))
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect()
}

#[test]
fn character_carleman_has_one_singular_row() {
    let d = scratch_dir("gamma1");
    let f = write_func(&d, &FunctionDescriptor::character(1.0, cr(1.0)));
    let out = bin()
        .args(["analyze", "--func", &f, "--spectrum", "Carleman", "--grid", "-3:3:0.05"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("# config: {"));
    assert_eq!(rows_with(&out, "Singular"), vec!["1.00".to_string()]);
}

#[test]
fn chirp_laplace_has_no_singular_rows() {
    let d = scratch_dir("chirp");
    let f = write_func(&d, &FunctionDescriptor::chirp());
    let out = bin()
        .args(["analyze", "--func", &f, "--spectrum", "Laplace", "--grid", "-3:3:0.05"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(rows_with(&out, "Singular").is_empty());
    assert_eq!(rows_with(&out, "Regular").len() + rows_with(&out, "Undecided").len(), 121);
}

#[test]
fn json_report_carries_config() {
    let d = scratch_dir("json");
    let f = write_func(&d, &FunctionDescriptor::character(0.5, cr(2.0)));
    let out = bin()
        .args(["analyze", "--func", &f, "--spectrum", "Laplace", "--grid", "0:1:0.25", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["spectrum"], "Laplace");
    assert!(v["results"].is_array());
}

#[test]
fn bad_inputs_exit_one() {
    let d = scratch_dir("bad");
    let f = write_func(&d, &FunctionDescriptor::chirp());
    let cases: Vec<Vec<&str>> = vec![
        vec!["analyze", "--func", &f, "--spectrum", "Laplace", "--grid", "-3:3:0"],
        vec!["analyze", "--func", &f, "--spectrum", "Laplace", "--grid", "-3:3:-0.1"],
        vec!["analyze", "--func", &f, "--spectrum", "Nope"],
        vec!["analyze", "--func", "/nonexistent/f.json", "--spectrum", "Laplace"],
        vec!["analyze", "--spectrum", "Laplace"],
        vec!["analyze", "--func", &f, "--spectrum", "Laplace", "--tol", "bogus=1"],
        vec!["verify", "--suite", "no_such_suite"],
        vec!["verify", "--suite", "sec3", "--threads", "0"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn beurling_on_half_line_is_input_error() {
    let d = scratch_dir("half");
    let f = d.join("half.json");
    let full = FunctionDescriptor::character(2.0, cr(1.0));
    let phi = FunctionDescriptor::new(Domain::HalfLine, 1, full.body).unwrap();
    std::fs::write(&f, phi.to_json()).unwrap();
    let out = bin()
        .args(["analyze", "--func", f.to_str().unwrap(), "--spectrum", "Beurling", "--grid", "0:1:0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_sec3_with_matrix_passes() {
    let d = scratch_dir("sec3");
    let m = d.join("a.json");
    std::fs::write(&m, r#"{"A": [[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 2.0]]]}"#).unwrap();
    let out = bin()
        .args(["verify", "--suite", "sec3", "--matrix", m.to_str().unwrap(), "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_csv_has_one_row_per_assertion() {
    let d = scratch_dir("csv");
    let out_path = d.join("r.csv");
    let st = bin()
        .args(["verify", "--suite", "sec3", "--out", out_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config:"));
    assert!(lines.next().unwrap().starts_with("suite,name,subject"));
    assert!(lines.count() > 20);
}
