use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn zcancel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zcancel")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Bush with `d` chains of length `m` over the point `0`.
fn gamma_json(d: usize, m: usize) -> String {
    let mut branch = "[-1,[]]".to_string();
    for _ in 1..m {
        branch = format!("[-2,[{branch}]]");
    }
    let branches = vec![branch; d].join(",");
    format!(r#"{{"base":{{"points":["0"]}},"fibers":{{"0":[-{d},[{branches}]]}}}}"#)
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn hj_prints_the_string() {
    let out = zcancel(&["hj", "5", "2"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "[-3,-2]\n");
    assert_eq!(zcancel(&["hj", "4", "2"]).status.code(), Some(1));
}

#[test]
fn analyze_gamma_2_3() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "gamma_2_3.json", &gamma_json(2, 3));
    let out = zcancel(&["analyze", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["vertex_count"], 9);
    assert_eq!(v["picard_number"], 1);
    assert_eq!(v["zariski_status"]["kind"], "NotZariski1Factor");
}

#[test]
fn compare_danielewski_cylinders() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "d1.json", &gamma_json(2, 1));
    let b = write(&dir, "d2.json", &gamma_json(2, 4));
    let c = write(&dir, "d3.json", &gamma_json(3, 1));
    let out = zcancel(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--over-base"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "yes");
    assert!(!v["certificate"]["citation"].as_str().unwrap().is_empty());
    let out = zcancel(&["compare", a.to_str().unwrap(), c.to_str().unwrap(), "--over-base"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "no");
}

#[test]
fn classify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let e1 = write(&dir, "e1", "z^2*t - u^2 + 1 = 0");
    let e2 = write(&dir, "e2", "z^2*t - u^2 + 4 = 0");
    let e3 = write(&dir, "e3", "z^2*t - u^2 - 1 = 0");
    let out = zcancel(&["classify-eq", e1.to_str().unwrap(), e2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "isomorphic");
    let out = zcancel(&["classify-eq", e1.to_str().unwrap(), e3.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "unknown");

    let m1 = write(&dir, "m1", "z^2*t - (u^3 + z^2*u + z^3) - 1");
    let m2 = write(&dir, "m2", "z^2*t - (u^3 + 4*z^2*u - 8*z^3) - 1");
    let out = zcancel(&["classify-eq", "--family", "mm", m1.to_str().unwrap(), m2.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["lambda"], "-2");
}

#[test]
fn input_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"base\":\n  [");
    let out = zcancel(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let eq = write(&dir, "eq", "z^2*t - u^^2");
    assert_eq!(zcancel(&["classify-eq", eq.to_str().unwrap(), eq.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(zcancel(&["analyze", "/nonexistent/divisor.json"]).status.code(), Some(1));
    assert_eq!(zcancel(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn family_and_cover() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", &gamma_json(2, 1));
    let out = zcancel(&["family", p.to_str().unwrap(), "--k", "3"]);
    assert!(out.status.success());
    let counts: Vec<u64> = json(&out).as_array().unwrap().iter().map(|m| m["vertex_count"].as_u64().unwrap()).collect();
    assert_eq!(counts, [7, 9, 11]);
    let out = zcancel(&["cover", "--dpd", "p1:1/2,p2:3/4"]);
    let v = json(&out);
    assert_eq!(v["order"], 4);
    assert_eq!(v["points"][1]["singularity"]["hj"], serde_json::json!([-2, -2, -2]));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "g.json", &gamma_json(3, 2));
    for args in [
        vec!["analyze", p.to_str().unwrap()],
        vec!["--format", "dot", "analyze", p.to_str().unwrap()],
        vec!["stretch", p.to_str().unwrap(), "--stretch", "0:level=top,a=2"],
    ] {
        let (a, b) = (zcancel(&args), zcancel(&args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}
