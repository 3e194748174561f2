use std::io::Write;
use std::process::Command;

use zetaops::cli::{fmt15, run};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["zetaops"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

// Gamma(1/4) and zeta(1/2) to double precision.
const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;
const ZETA_HALF: f64 = -1.460_354_508_809_586_8;

#[test]
fn xi_at_half() {
    let (code, out, _) = call(&["xi", "--s", "0.5,0"]);
    assert_eq!(code, 0);
    let v: Vec<f64> = out.split_whitespace().map(|w| w.parse().unwrap()).collect();
    let want = std::f64::consts::PI.powf(-0.25) * GAMMA_QUARTER * ZETA_HALF;
    assert!((v[0] - want).abs() < 1e-12 * want.abs(), "{} vs {}", v[0], want);
    assert_eq!(v[1], 0.0);
}

#[test]
fn xi_engines_agree() {
    let (_, a, _) = call(&["xi", "--s", "2,3"]);
    let (code, b, _) = call(&["xi", "--s", "2,3", "--engine", "ibp", "--n", "2"]);
    assert_eq!(code, 0);
    let pa: Vec<f64> = a.split_whitespace().map(|w| w.parse().unwrap()).collect();
    let pb: Vec<f64> = b.split_whitespace().map(|w| w.parse().unwrap()).collect();
    let scale = pa[0].hypot(pa[1]);
    assert!((pa[0] - pb[0]).hypot(pa[1] - pb[1]) < 1e-9 * scale);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(call(&["xi", "--s", "abc"]).0, 2);
    assert_eq!(call(&["heat", "--m", "1", "--rho", "-1", "--k-max", "2"]).0, 2);
    assert_eq!(call(&["heat", "--m", "7", "--rho", "1", "--k-max", "2"]).0, 2);
    assert_eq!(call(&["check", "--op", "(H)"]).0, 2);
    assert_eq!(call(&["nosuch"]).0, 2);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("zeros"));
}

#[test]
fn zeros_csv() {
    let (code, out, _) = call(&["zeros", "--t-max", "24"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("index,ordinate,residual"));
    let rows: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert!((rows[0] - 14.134_725_141_734_693).abs() < 1e-9);
    assert!((rows[1] - 21.022_039_638_771_555).abs() < 1e-9);
}

#[test]
fn zeros_above_cap() {
    let (code, _, err) = call(&["zeros", "--t-max", "1e6"]);
    assert_eq!(code, 1);
    assert!(err.contains("cap"));
}

#[test]
fn weil_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.csv");
    let (code, _, _) = call(&["zeros", "--t-max", "40", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, out, _) = call(&["weil", "--function", "gaussian", "--zeros", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: f64 = out.trim().parse().unwrap();
    assert!(v.is_finite() && v >= -1e-6);

    let (code, _, err) = call(&["weil", "--function", "nosuch", "--zeros", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("battery"));
}

#[test]
fn weil_rejects_bad_csv() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "index,ordinate,residual\n0,20,0\n1,10,0").unwrap();
    let (code, _, _) = call(&["weil", "--function", "gaussian", "--zeros", f.path().to_str().unwrap()]);
    assert_ne!(code, 0);
}

#[test]
fn check_filter_json() {
    let (code, out, _) = call(&["check", "--filter", "xi.functional_equation"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["name"], "xi.functional_equation");
    assert_eq!(arr[0]["passed"], true);
}

#[test]
fn check_empty_filter_warns() {
    let (code, out, err) = call(&["check", "--filter", "no.such.check*"]);
    assert_eq!(code, 0);
    assert!(err.contains("no checks match"));
    assert_eq!(out.trim(), "[]");
}

#[test]
fn check_tau_shift_fails() {
    let (code, _, err) = call(&["check", "--filter", "adjoint.*", "--tau-shift", "0.1"]);
    assert_eq!(code, 1);
    assert!(err.contains("failed"));
}

#[test]
fn check_op_adjoint() {
    let (code, out, _) = call(&["check", "--op", "(compose (tau 0 -1) (d 2))", "--format", "csv"]);
    assert_eq!(code, 0, "{}", out);
    assert!(out.starts_with("name,residual,tolerance,passed\n"));
    assert!(out.lines().count() > 1);
}

#[test]
fn config_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# comment\nformat = csv\nseed = 7").unwrap();
    let p = f.path().to_str().unwrap().to_string();
    let (code, out, _) = call(&["--config", &p, "check", "--filter", "xi.functional_equation"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("name,residual,tolerance,passed\nxi.functional_equation,"));

    let mut g = tempfile::NamedTempFile::new().unwrap();
    writeln!(g, "n_points = 100").unwrap();
    let p = g.path().to_str().unwrap().to_string();
    assert_eq!(call(&["--config", &p, "xi", "--s", "2"]).0, 2);
}

#[test]
fn heat_csv() {
    let (code, out, _) = call(&["heat", "--m", "1", "--rho", "0.05", "--k-max", "3"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("k,predicted_re,predicted_im,located_re,located_im,distance,residual"));
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f.len(), 7);
        let dist: f64 = f[5].parse().unwrap();
        assert!(dist < 1e-6, "{}", l);
    }
}

#[test]
fn fmt15_digits() {
    assert_eq!(fmt15(0.1 + 0.2), "0.3");
    assert_eq!(fmt15(-2.5), "-2.5");
    assert_eq!(fmt15(std::f64::consts::PI), "3.14159265358979");
    assert!(fmt15(1e-20).contains('e'));
}

#[test]
fn binary_runs() {
    let o = Command::new(env!("CARGO_BIN_EXE_zetaops")).args(["xi", "--s", "2"]).output().unwrap();
    assert!(o.status.success());
    let v: f64 = String::from_utf8_lossy(&o.stdout).split_whitespace().next().unwrap().parse().unwrap();
    // Xi(2) = pi^{-1} * 1 * pi^2/6
    assert!((v - std::f64::consts::PI / 6.0).abs() < 1e-13);
    let o = Command::new(env!("CARGO_BIN_EXE_zetaops")).args(["heat"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
