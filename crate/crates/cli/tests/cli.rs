//! End-to-end runs of the `g2kit` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn g2kit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2kit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn identity<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["summary"]["identities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["name"] == name)
        .unwrap_or_else(|| panic!("no identity {name}"))
}

fn classifications(r: &Value) -> Vec<String> {
    r["summary"]["classifications"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn classify_examples() {
    let out = g2kit(&["classify", "parallel", "--points", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["schema"], "g2kit-report/1");
    assert_eq!(r["command"], "classify");
    assert_eq!(classifications(&r), ["parallel"]);
    assert_eq!(r["records"].as_array().unwrap().len(), 3);
    for key in ["star_orientation", "codifferential_sign", "norms", "spinor_sign"] {
        assert!(r["conventions"][key].is_string(), "{key}");
    }

    let r = report(&g2kit(&["classify", "--example", "conformal", "--points", "4"]));
    assert_eq!(classifications(&r), ["W4, locally-conformally-parallel"]);
    let flags = &r["records"][0]["classification"]["flags"];
    assert_eq!(flags["w4"], true);
    assert_eq!(flags["w2"], false);

    let r = report(&g2kit(&["classify", "sphere", "--points", "4"]));
    assert_eq!(classifications(&r), ["W1, nearly-parallel"]);
}

#[test]
fn verify_pointwise_and_th2_on_the_conformal_family() {
    let out = g2kit(&["verify", "conformal", "--suite", "pointwise,th2", "--points", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["tolerances"]["pointwise"], 1e-12);
    assert_eq!(r["tolerances"]["th2"], 1e-6);
    assert_eq!(r["summary"]["pass"], true);
    for name in [
        "omega-volume",
        "contraction",
        "projector-traces",
        "omega-eigenvalue",
        "lambda2-14-annihilates",
    ] {
        assert!(identity(&r, name)["max_relative"].as_f64().unwrap() < 1e-12, "{name}");
    }
    for name in ["sc1", "c5", "as", "tB-first", "dir1", "nabla-psi", "nabla-omega"] {
        assert_eq!(identity(&r, name)["pass"], true, "{name}");
    }
}

#[test]
fn summary_maxima_are_per_point_maxima() {
    let r = report(&g2kit(&["verify", "sphere", "--suite", "th2,sur", "--points", "5"]));
    for s in r["summary"]["identities"].as_array().unwrap() {
        let suite_key = match s["suite"].as_str().unwrap() {
            "th2" => "curvature",
            "sur" => "sur",
            other => panic!("unexpected suite {other}"),
        };
        let per_point: Vec<f64> = r["records"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|rec| rec[suite_key]["checks"].as_array().unwrap().clone())
            .filter(|c| c["name"] == s["name"])
            .map(|c| c["relative"].as_f64().unwrap())
            .collect();
        assert_eq!(per_point.len(), 5);
        let max = per_point.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(s["max_relative"].as_f64().unwrap(), max, "{}", s["name"]);
    }
}

#[test]
fn killing_suite_depends_on_the_dilation() {
    let out = g2kit(&[
        "verify",
        "conformal",
        "--suite",
        "th3",
        "--dilation",
        "-2f",
        "--points",
        "4",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r["dilation"].as_str().is_some());
    assert!(identity(&r, "killing-spinor")["max_relative"].as_f64().unwrap() < 1e-9);
    assert_eq!(identity(&r, "lsc")["pass"], true);

    let out = g2kit(&[
        "verify",
        "conformal",
        "--suite",
        "th3",
        "--dilation",
        "2f",
        "--points",
        "4",
    ]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(identity(&r, "killing-spinor")["pass"], false);
    assert!(r["records"][0]["killing"]["report"].is_null());

    let out = g2kit(&["verify", "catenoid", "--suite", "th3", "--points", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn curvature_dumps() {
    let r = report(&g2kit(&["curvature", "sphere", "--points", "3"]));
    for rec in r["records"].as_array().unwrap() {
        assert!((rec["curvature"]["scal_lc"].as_f64().unwrap() - 42.0).abs() < 1e-5);
        assert_eq!(rec["gauss"]["name"], "gauss-vs-lc");
    }
    let r = report(&g2kit(&["curvature", "hyperplane", "--points", "2"]));
    for rec in r["records"].as_array().unwrap() {
        assert_eq!(rec["curvature"]["scal_lc"].as_f64().unwrap(), 0.0);
    }
    let r = report(&g2kit(&["curvature", "catenoid", "--params", "a=0.8", "--points", "3"]));
    assert_eq!(r["example"]["params"]["a"], "0.8");
    for rec in r["records"].as_array().unwrap() {
        assert!(rec["curvature"]["scal_lc"].as_f64().unwrap() < 0.0);
    }
    assert_eq!(r["summary"]["pass"], true);
}

#[test]
fn stated_spinor_identity_fails_on_the_quartic() {
    let out = g2kit(&["verify", "quartic", "--suite", "tb", "--points", "3"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(identity(&r, "tB-first")["pass"], false);
    assert_eq!(identity(&r, "tB-first-general")["pass"], true);
    assert_eq!(identity(&r, "tB-second")["pass"], true);
}

#[test]
fn graph_with_custom_height() {
    let out = g2kit(&[
        "verify",
        "graph",
        "--params",
        "h=0.2 x1 x2 - 0.1 x3^2",
        "--suite",
        "sur",
        "--points",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(identity(&report(&out), "gauss-vs-lc")["pass"], true);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["verify", "torus"][..],
        &["verify", "parallel", "--tol", "0"],
        &["verify", "parallel", "--tol", "-1e-6"],
        &["verify", "sphere", "--params", "radius=2"],
        &["verify", "parallel", "--suite", "everything"],
        &["verify", "parallel", "--suite", "sur"],
        &["verify", "sphere", "--suite", "th3", "--dilation", "-2f"],
        &["verify", "graph"],
        &["classify"],
        &["verify", "parallel", "--config", "/nonexistent/run.toml"],
    ] {
        let out = g2kit(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn computation_errors_exit_with_three() {
    let out = g2kit(&["verify", "w2-contaminated", "--suite", "th2", "--points", "2"]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("point 0") && err.contains("not integrable"), "{err}");
    // classification itself works on non-integrable structures
    let out = g2kit(&["classify", "w2-contaminated", "--points", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["records"][0]["classification"]["flags"]["w2"], true);
}

#[test]
fn reports_are_byte_stable() {
    let args = [
        "verify",
        "conformal",
        "--suite",
        "pointwise,th2",
        "--points",
        "6",
        "--seed",
        "11",
    ];
    let first = g2kit(&args);
    let second = g2kit(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let path_arg = path.to_str().unwrap();
    let mut with_file: Vec<&str> = args.to_vec();
    with_file.extend(["--json", path_arg]);
    let out = g2kit(&with_file);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), first.stdout);

    let other_seed = g2kit(&[
        "verify",
        "conformal",
        "--suite",
        "pointwise,th2",
        "--points",
        "6",
        "--seed",
        "12",
    ]);
    assert_ne!(other_seed.stdout, first.stdout);
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "example = \"conformal\"\npoints = 3\nseed = 5\nsuite = \"th3\"\ndilation = \"-2f\"\n\n[params]\ncubic_seed = 3\nscale = 0.05\n",
    );
    let out = g2kit(&["verify", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["points"], 3);
    assert_eq!(r["seed"], 5);
    assert_eq!(r["example"]["params"]["cubic_seed"], "3");
    assert_eq!(r["suites"], serde_json::json!(["th3"]));

    let out = g2kit(&["verify", "--config", &cfg, "--points", "2", "--dilation", "2f"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert_eq!(r["points"], 2);
    assert_eq!(r["records"].as_array().unwrap().len(), 2);

    let bad = write_config(dir.path(), "example = \"parallel\"\nsuites = \"th2\"\n");
    assert_eq!(code(&g2kit(&["verify", "--config", &bad])), 2);
}

#[test]
fn examples_listing_names_every_entry() {
    let out = g2kit(&["examples"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "parallel",
        "conformal",
        "w2-contaminated",
        "hyperplane",
        "sphere",
        "catenoid",
        "quartic",
        "graph",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
