use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxforms")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(out);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    (header, lines.map(|l| l.split(',').map(str::to_owned).collect()).collect())
}

#[test]
fn identities_report_is_clean() {
    let out = run(&["identities", "--N", "4", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["config", "results", "residuals"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["residuals"]["max_sign"], 0);
    assert!(v["residuals"]["max_calculus"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn bessel_zeros_of_half_order_are_multiples_of_pi() {
    let out = run(&["bessel-zeros", "--n", "1", "--kind", "fn", "--count", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["m", "zero", "residual"]);
    for (k, row) in rows.iter().enumerate() {
        let z: f64 = row[1].parse().unwrap();
        assert!((z - (k + 1) as f64 * PI).abs() < 1e-10);
    }
    // Twelve significant digits.
    assert_eq!(rows[0][1], "3.14159265359e0");
}

#[test]
fn eigen2d_matches_bessel_table() {
    let out = run(&["eigen2d", "--q", "0", "--modes", "4", "--grid", "512,512", "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["rank", "lambda_num", "lambda_bessel", "rel_err", "route"]);
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().any(|r| r[4] == "zaremba2d") && rows.iter().any(|r| r[4] == "radial-dirichlet"));
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() <= 0.01));
    let neumann = run(&["eigen2d", "--q", "1", "--modes", "3", "--grid", "400,8"]);
    let (_, rows) = csv_rows(&neumann);
    assert!(rows.iter().all(|r| r[4] == "radial-neumann"));
}

#[test]
fn eigen2d_json_lists_eigenform_metadata() {
    let v = json(&run(&["eigen2d", "--q", "1", "--modes", "2", "--grid", "200,8", "--format", "json"]));
    let forms = v["results"]["eigenforms"].as_array().unwrap();
    assert_eq!(forms.len(), 2);
    assert!((forms[0]["omega"].as_f64().unwrap() - 1.165561185).abs() < 1e-8);
}

#[test]
fn output_is_deterministic_and_file_output_matches() {
    let a = run(&["eigen1d", "--modes", "5", "--grid", "500"]);
    let b = run(&["eigen1d", "--modes", "5", "--grid", "500"]);
    assert_eq!(a.stdout, b.stdout);
    let path = std::env::temp_dir().join(format!("maxforms-cli-{}.csv", std::process::id()));
    let c = run(&["eigen1d", "--modes", "5", "--grid", "500", "--output", path.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn dn_fields_rank_is_arcs_minus_one() {
    let v = json(&run(&["dn-fields", "--arcs", "0:1,2:3,4:5", "--h", "0.05", "--strict"]));
    assert_eq!(v["results"]["K"], 3);
    assert_eq!(v["results"]["rank"], 2);
    assert_eq!(v["results"]["gram_eigenvalues"].as_array().unwrap().len(), 3);
    assert_eq!(v["residuals"].as_array().unwrap().len(), 3);
}

#[test]
fn regularity_and_expand_reports() {
    let v = json(&run(&["regularity", "--q", "1", "--n", "1", "--m", "1", "--field", "E"]));
    assert_eq!(v["results"]["verdict"], "not-h1");
    let v = json(&run(&["expand", "--q", "0", "--n", "2", "--m", "1", "--modes", "4", "--strict"]));
    let significant = v["results"]["significant"].as_array().unwrap();
    assert_eq!(significant.len(), 1);
    assert_eq!(significant[0]["family"], "c");
    assert_eq!(significant[0]["mode"], 2);
}

#[test]
fn exit_codes() {
    let usage = run(&["eigen1d", "--bogus"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // Overlapping arcs are rejected by the solver's validation.
    assert_eq!(run(&["dn-fields", "--arcs", "0:1,0.5:2"]).status.code(), Some(2));
    // A tolerance violation only fails under --strict.
    assert_eq!(run(&["eigen1d", "--grid", "16", "--tol", "1e-12"]).status.code(), Some(0));
    assert_eq!(run(&["eigen1d", "--grid", "16", "--tol", "1e-12", "--strict"]).status.code(), Some(1));
}
