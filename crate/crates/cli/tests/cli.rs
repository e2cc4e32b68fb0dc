use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fourier_extension::extension::ExtensionConfig;
use fourier_extension::refined::{fine_boundary_abscissae, RefinedConfig};
use fourier_extension::special::TestFunction;

fn fext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fext"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fext(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    fext(args).status.code().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fext-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Parses CSV stdout into header-keyed rows.
fn table(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn field(text: &str, name: &str) -> f64 {
    table(text)[0][name].parse().unwrap()
}

fn write_samples(path: &Path, ts: &[f64], f: impl Fn(f64) -> (f64, f64)) {
    let mut s = String::from("t,re,im\n");
    for &t in ts {
        let (re, im) = f(t);
        s.push_str(&format!("{t:?},{re:?},{im:?}\n"));
    }
    std::fs::write(path, s).unwrap();
}

fn grid(m: usize) -> Vec<f64> {
    (0..=2 * m).map(|i| (i as f64 - m as f64) / m as f64).collect()
}

#[test]
fn plane_wave_reaches_machine_precision() {
    let out = ok(&["approximate", "--function", "exp_iw", "--omega", "20", "--M", "500"]);
    assert!(field(&out, "max_error") <= 1e-12);
}

#[test]
fn constant_file_is_reproduced() {
    let dir = scratch("const");
    let path = dir.join("one.csv");
    write_samples(&path, &grid(50), |_| (1.0, 0.0));
    let out = ok(&["approximate", "--input", path.to_str().unwrap(), "--function", "one"]);
    assert_eq!(field(&out, "m_half"), 50.0);
    assert!(field(&out, "max_error") <= 1e-12);
}

#[test]
fn refinement_helps_boundary_oscillations() {
    let e = |r: &str| field(&ok(&["approximate", "--function", "f12", "--M", "2000", "--R", r]), "max_error");
    assert!(e("4") < e("1"));
}

#[test]
fn outputs_round_trip_through_ingestion() {
    let dir = scratch("roundtrip");
    let prefix = dir.join("run");
    ok(&["approximate", "--function", "f1", "--M", "60", "--output", prefix.to_str().unwrap()]);
    let coeffs = std::fs::read_to_string(dir.join("run.coefficients.csv")).unwrap();
    assert!(coeffs.starts_with("k,re,im\n"));
    let dense = dir.join("run.dense.csv");
    // The dense grid is itself a uniform grid with M = 600.
    let out = ok(&["approximate", "--input", dense.to_str().unwrap(), "--function", "f1"]);
    assert_eq!(field(&out, "m_half"), 600.0);
    assert!(field(&out, "max_error") <= 1e-11);

    ok(&["approximate", "--function", "f1", "--M", "60", "--output", prefix.to_str().unwrap(), "--format", "json"]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("run.dense.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 1201);
}

#[test]
fn fine_boundary_file_matches_function_spec() {
    let dir = scratch("fine");
    let m = 300;
    let f = TestFunction::F12;
    let samples = dir.join("s.csv");
    write_samples(&samples, &grid(m), |t| (f.value(t).re, 0.0));
    let rc = RefinedConfig::new(ExtensionConfig::default(), 3).unwrap();
    let (left, right) = fine_boundary_abscissae(&rc, m).unwrap();
    let fine = dir.join("fine.csv");
    let ts: Vec<f64> = left.iter().chain(&right).copied().collect();
    write_samples(&fine, &ts, |t| (f.value(t).re, 0.0));

    let from_file = ok(&[
        "approximate", "--input", samples.to_str().unwrap(), "--fine-boundary", fine.to_str().unwrap(),
        "--R", "3", "--function", "f12",
    ]);
    let from_spec = ok(&["approximate", "--function", "f12", "--M", "300", "--R", "3"]);
    let (a, b) = (field(&from_file, "max_error"), field(&from_spec, "max_error"));
    assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{a} vs {b}");

    // Without the companion file there is nothing to refine with.
    assert_eq!(code(&["approximate", "--input", samples.to_str().unwrap(), "--R", "3"]), 2);
    // A companion on the wrong abscissae is rejected.
    write_samples(&fine, &ts.iter().map(|t| t * 0.5).collect::<Vec<_>>(), |_| (0.0, 0.0));
    assert_eq!(
        code(&["approximate", "--input", samples.to_str().unwrap(), "--fine-boundary", fine.to_str().unwrap(), "--R", "3"]),
        2
    );
}

#[test]
fn bad_inputs_exit_with_validation_code() {
    let dir = scratch("bad");
    let path = dir.join("bad.csv");
    let mut ts = grid(40);
    ts[7] += 1e-9;
    write_samples(&path, &ts, |_| (1.0, 0.0));
    assert_eq!(code(&["approximate", "--input", path.to_str().unwrap()]), 2);
    std::fs::write(&path, "t,re\n-1,1\n0,x\n1,1\n").unwrap();
    assert_eq!(code(&["approximate", "--input", path.to_str().unwrap()]), 2);
    assert_eq!(code(&["approximate", "--input", dir.join("missing.csv").to_str().unwrap()]), 2);
    assert_eq!(code(&["approximate", "--function", "f99", "--M", "100"]), 2);
    assert_eq!(code(&["approximate", "--function", "f1"]), 2);
    assert_eq!(code(&["approximate", "--function", "f1", "--M", "100", "--Tdelta", "0.5"]), 2);
    assert_eq!(code(&["sweep", "--param", "M", "--values", "200,100", "--omega", "3"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn sweep_over_refinement() {
    let out = ok(&["sweep", "--param", "R", "--values", "1,2,3,4,5,6", "--omega", "300", "--M", "500"]);
    let e: Vec<f64> = table(&out).iter().map(|r| r["max_error"].parse().unwrap()).collect();
    assert_eq!(e.len(), 6);
    assert!(e[0] > e[1] && e[1] > e[2] && e[2] > e[3], "{e:?}");
    assert!(e[4] > e[3] && e[5] > e[3], "{e:?}");
}

#[test]
fn sweep_records_failed_points() {
    let args = ["sweep", "--param", "M", "--values", "10,100,200", "--function", "exp"];
    let out = ok(&args);
    let rows = table(&out);
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["max_error"].parse::<f64>().unwrap().is_nan());
    assert!(rows[2]["max_error"].parse::<f64>().unwrap() < 1e-12);
    let errors = |s: &str| table(s).iter().map(|r| r["max_error"].clone()).collect::<Vec<_>>();
    assert_eq!(errors(&out), errors(&ok(&args)));
}

#[test]
fn resolution_brackets() {
    let m_star = |args: &[&str]| -> usize {
        let out = ok(args);
        table(&out)
            .iter()
            .find(|r| r["selected"] == "true")
            .map(|r| r["M"].parse().unwrap())
            .unwrap()
    };
    let b = m_star(&["resolution", "--omega", "20", "--delta", "1e-10"]);
    assert!((20..=140).contains(&b), "{b}");
    let fd = m_star(&["resolution", "--omega", "20", "--delta", "1e-10", "--baseline", "--hi", "1000"]);
    assert!((60..=100).contains(&fd), "{fd}");
    assert_eq!(code(&["resolution", "--omega", "200", "--hi", "60"]), 3);
    assert_eq!(code(&["resolution", "--omega", "20", "--delta", "2"]), 2);
}

#[test]
fn bench_scales_like_m_log_m() {
    let out = ok(&["bench", "--M", "16384,65536"]);
    let rows = table(&out);
    let t = |i: usize| rows[i]["seconds"].parse::<f64>().unwrap();
    assert!(t(1) / t(0) <= 5.5, "{} / {}", t(1), t(0));
    let json: serde_json::Value = serde_json::from_str(&ok(&["bench", "--M", "1000,2000", "--format", "json"])).unwrap();
    assert!(json["precompute_seconds"].as_f64().unwrap() > 0.0);
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn cache_round_trip_and_guards() {
    let dir = scratch("cache");
    let path = dir.join("op.txt");
    let p = path.to_str().unwrap();
    let saved = ok(&["cache", "save", "--path", p]);
    assert_eq!(ok(&["cache", "load", "--path", p]), saved);
    assert_eq!(code(&["cache", "load", "--path", p, "--mdelta", "30"]), 2);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("sigma = 9", "sigma = 8", 1)).unwrap();
    let out = fext(&["cache", "load", "--path", p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("checksum"));
}

#[test]
fn compare_favours_boundary_method_on_interior_oscillation() {
    let out = ok(&["compare", "--function", "f4", "--M", "150"]);
    let rows = table(&out);
    let e = |i: usize| rows[i]["max_error"].parse::<f64>().unwrap();
    assert_eq!((rows[0]["method"].as_str(), rows[1]["method"].as_str()), ("boundary", "fulldata"));
    assert!(e(0) < 1e-10 && e(1) > e(0));
}

#[test]
fn m_hat_estimate() {
    let out = ok(&["estimate", "mhat", "--Tdelta", "2.3", "--gamma", "2"]);
    let m: usize = out.trim().parse().unwrap();
    assert!((55..=75).contains(&m), "{m}");
}
