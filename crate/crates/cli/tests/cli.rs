use ringext::orthogonality::{MatrixKind, OrthMatrix, OrthogonalityContext};
use ringext::ring::{build_ring, RingConfig};
use ringext::weight::WeightSpec;
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringext")).args(args).current_dir(root()).env_remove("RINGEXT_MAX_ORDER").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn z4_lee_criterion() {
    let v = json(&["criterion", "--ring", "Z(4)", "--weight", &data("lee.json")]);
    assert_eq!(v["passes"], true);
    assert_eq!(v["factors"], serde_json::json!({"2R": "-2", "R": "-2"}));
    assert_eq!(v["decisive"], serde_json::json!(["2R"]));
    assert_eq!(v["det_w0"], "-4");
}

#[test]
fn mat2_rank_analysis_passes() {
    let v = json(&["analyze", "--ring", "Mat(2,GF(2))", "--weight", &data("rank.json")]);
    assert_eq!(v["criterion"]["passes"], true);
    assert_eq!(v["ring"]["classification"]["is_pir"], true);
    assert_eq!(v["structure"]["tq_is_identity"], true);
    assert_eq!(v["structure"]["triangularity"]["lower_triangular"], true);
}

#[test]
fn non_pir_is_refused_with_det_w0() {
    let v = json(&["criterion", "--ring", "Table(fixtures/fq_xy.json)", "--weight", &data("w.json")]);
    assert_eq!(v["is_pir"], false);
    assert_eq!(v["passes"], Value::Null);
    assert!(v["refused"].is_string());
    // -2 w(xy)^5 with w(xy) = 3
    assert_eq!(v["det_w0"], "-486");
}

#[test]
fn matrix_round_trip() {
    let out = json(&["matrix", "--ring", "Z(4)", "--weight", "lee", "--which", "W0"]);
    let parsed: OrthMatrix = serde_json::from_value(out.clone()).unwrap();
    let ring = build_ring("Z(4)", &RingConfig::default()).unwrap();
    let w = WeightSpec::Lee.build(&ring).unwrap();
    let expected = OrthogonalityContext::new(&ring).unwrap().build_matrix(&w, MatrixKind::W0).unwrap();
    assert_eq!(parsed, expected);
    assert_eq!(out["det"], "-4");
}

#[test]
fn w0_flag_enters_matrix_w() {
    let v = json(&["matrix", "--ring", "Z(4)", "--weight", "lee", "--which", "W", "--w0", "5/3"]);
    assert_eq!(v["entries"][0], serde_json::json!(["5/3", "5/3", "5/3"]));
}

#[test]
fn reports_are_deterministic_apart_from_timings() {
    let args = ["analyze", "--ring", "Z(12)", "--weight", "homogeneous", "--matrices"];
    let strip = |o: Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timings_ms");
        serde_json::to_vec(&v).unwrap()
    };
    assert_eq!(strip(run(&args)), strip(run(&args)));
}

#[test]
fn counterexample_for_degenerate_z4_weight() {
    let v = json(&["counterexample", "--ring", "Z(4)", "--weight", &data("z4_degenerate.json")]);
    assert_eq!(v["pair"]["g_plus"], serde_json::json!(["2", "1"]));
    assert_eq!(v["pair"]["g_minus"], serde_json::json!(["1", "0"]));
    assert_eq!(v["isometry"], true);
    assert_eq!(v["extension"]["extendable"], false);
}

#[test]
fn oracle_and_strict_exit() {
    let v = json(&["oracle", "--ring", "Z(4)", "--weight", &data("z4_degenerate.json"), "--max-len", "2"]);
    assert_eq!(v["extension_property"], false);
    let out = run(&["criterion", "--ring", "Z(4)", "--weight", &data("z4_degenerate.json"), "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["criterion", "--ring", "Z(4)", "--weight", &data("z4_degenerate.json")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_errors_exit_2_and_name_the_token() {
    let out = run(&["criterion", "--ring", "Z(4", "--weight", "lee"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Z(4"));

    let out = run(&["criterion", "--ring", "Z(4)", "--weight", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = run(&["validate", "--ring", "Z(4)", "--weight", &data("z4_not_invariant.json")]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["criterion", "--ring", "Mat(2,GF(5))", "--weight", "rank", "--max-order", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn max_order_env_var() {
    let out = Command::new(env!("CARGO_BIN_EXE_ringext"))
        .args(["validate", "--ring", "Z(50)"])
        .env("RINGEXT_MAX_ORDER", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ideals_listing() {
    let v = json(&["ideals", "--ring", "Z(4)"]);
    let labels: Vec<&str> = v["ideals"].as_array().unwrap().iter().map(|i| i["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["0", "2R", "R"]);
    let mu: Vec<i64> = v["ideals"].as_array().unwrap().iter().map(|i| i["mu_from_zero"].as_i64().unwrap()).collect();
    assert_eq!(mu, [1, -1, 0]);
    assert_eq!(v["covers"], serde_json::json!([[0, 1], [1, 2]]));

    let all = json(&["ideals", "--ring", "Table(fixtures/fq_xy.json)", "--all"]);
    assert_eq!(all["ideals"].as_array().unwrap().len(), 7);
}

#[test]
fn text_format() {
    let out = run(&["criterion", "--ring", "Z(4)", "--weight", "lee", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("passes: true"));
    assert!(text.contains("2R: -2"));
}
