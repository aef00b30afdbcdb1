use std::path::PathBuf;
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use locusforge::server::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locusforge")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("locusforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

#[test]
fn locus_prints_the_crank_circle() {
    let o = run(&["locus", "--spec", data("camel_crank_circle.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(r#""4*x^2 + 4*y^2 - 121""#));
    assert!(o.stderr.is_empty());
}

#[test]
fn trace_prints_a_table() {
    let o = run(&["trace", "--spec", data("camel.json").to_str().unwrap(), "--samples", "8", "--branches", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "theta,branch,Ex,Ey,Hx,Hy,Mx,My");
    assert_eq!(lines.len(), 17);
}

#[test]
fn fit_prints_the_unit_circle() {
    let o = run(&["fit", "--degree", "2", "--points", data("unit_circle_points.csv").to_str().unwrap(), "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x^2 + y^2 - 1\n");
}

#[test]
fn prove_thales() {
    let o = run(&["prove", "--hypotheses", data("thales.txt").to_str().unwrap(), "--thesis", "(x+1)*(x-1) + y^2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "holds_plain\n");
    let h = tmp("h.json", r#"["x^2"]"#);
    let o = run(&["prove", "--hypotheses", h.to_str().unwrap(), "--thesis", "x"]);
    assert_eq!(stdout(&o), "holds_radical\n");
}

#[test]
fn exit_codes() {
    let bad = tmp("bad.json", r#"{"A": ["0", "0"]}"#);
    let o = run(&["locus", "--spec", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());

    let o = run(&["locus", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["fit", "--degree", "0", "--points", data("unit_circle_points.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["locus", "--spec", data("camel.json").to_str().unwrap(), "--deadline-ms", "0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[tokio::test]
async fn cli_and_http_agree() {
    let spec_path = data("camel.json");
    let spec: Value = serde_json::from_str(&std::fs::read_to_string(&spec_path).unwrap()).unwrap();
    let cli = stdout(&run(&["locus", "--spec", spec_path.to_str().unwrap()]));
    let body = json!({"payload": spec}).to_string();
    let req = Request::post("/locus").header("content-type", "application/json").body(Body::from(body)).unwrap();
    let resp = router(AppState::new(1)).oneshot(req).await.unwrap();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(cli.trim_end(), std::str::from_utf8(&bytes).unwrap());
}
