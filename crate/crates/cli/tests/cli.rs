use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tubular::search::GapCertificate;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tubular")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_kind(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} should fail");
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn certify(dir: &Path, cert: &Value) -> Output {
    run(&["certify", &write(dir, "cert.json", cert)])
}

/// "n/d" as a pair.
fn fraction(s: &str) -> (i64, i64) {
    match s.split_once('/') {
        Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
        None => (s.parse().unwrap(), 1),
    }
}

#[test]
fn documented_examples() {
    assert_eq!(ok(&["slope", "--vec", "[1,1,2,1,1,0]"]), json!("0"));
    assert_eq!(ok(&["euler", "--x", "h0", "--y", "hinf"]), json!(2));
    assert_eq!(ok(&["euler", "--x", "hinf", "--y", "h0"]), json!(-2));
    assert_eq!(ok(&["euler", "--x", "h0"]), json!(0));
    assert_eq!(ok(&["decompose", "--vec", "[2,1,2,1,1,0]"]), json!({"a": 1, "b": 0, "y": [1, 0, 0, 0, 0, 0]}));
    let cert = ok(&["gap-search", "--r", "sqrt:2", "--eps", "1/10", "--k", "50"]);
    assert_eq!(cert["slope"], json!("7/5"));
    assert_eq!(cert["mu"], json!(58));
}

#[test]
fn errors_are_json_objects() {
    assert_eq!(error_kind(&["frobnicate"]), "usage");
    assert_eq!(error_kind(&["slope", "--vec", "[0,0,1,0,0,1]"]), "undefined_slope");
    assert_eq!(error_kind(&["slope", "--vec", "[1,0,0,0,0,0]"]), "domain");
    assert_eq!(error_kind(&["gap-search", "--r", "sqrt:4", "--eps", "1/10", "--k", "3"]), "domain");
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{bad").unwrap();
    assert_eq!(error_kind(&["certify", dir.path().join("bad.json").to_str().unwrap()]), "parse");
    assert_eq!(error_kind(&["decompose", "--vec", "[1,0,0,0,0,1]"]), "precondition");
}

#[test]
fn output_is_byte_stable() {
    for args in [
        &["omega"][..],
        &["gap-search", "--r", "(1+1*sqrt(5))/2", "--eps", "1/7", "--k", "20"],
        &["delta", "--r", "sqrt:3", "--eps", "1/6"],
        &["tube-params", "--r", "sqrt:2", "--eps", "1/10", "--d", "3"],
    ] {
        let first = run(args);
        assert!(first.status.success());
        assert_eq!(first.stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn pretty_output_carries_the_same_value() {
    let args = ["delta", "--r", "sqrt:2", "--eps", "1/10"];
    let pretty = run(&[&args[..], &["--pretty"]].concat());
    assert_eq!(serde_json::from_slice::<Value>(&pretty.stdout).unwrap(), ok(&args));
}

#[test]
fn emitted_certificates_round_trip_and_certify() {
    let dir = tempfile::tempdir().unwrap();
    for (r, eps, k) in [("sqrt:2", "1/10", "50"), ("sqrt:3", "1/8", "30"), ("(0+1*sqrt(7))/2", "1/4", "0")] {
        let out = run(&["gap-search", "--r", r, "--eps", eps, "--k", k]);
        let cert: GapCertificate = serde_json::from_slice(&out.stdout).unwrap();
        let emitted: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(serde_json::to_value(&cert).unwrap(), emitted);
        let verdict: Value =
            serde_json::from_slice(&certify(dir.path(), &serde_json::to_value(&cert).unwrap()).stdout).unwrap();
        assert_eq!(verdict["accepted"], json!(true));
    }
}

#[test]
fn single_witness_mutations_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cert = ok(&["gap-search", "--r", "sqrt:2", "--eps", "1/10", "--k", "50"]);
    let (a, b) = (cert["a"].as_i64().unwrap(), cert["b"].as_i64().unwrap());
    let (cb, ca) = fraction(cert["nearest_competitor"]["slope"].as_str().unwrap());
    let count = cert["witnesses"].as_array().unwrap().len();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        // (s·b + t·cb)/(s·a + t·ca) lies strictly between b/a and the competitor, below r.
        let (s, t) = (rng.gen_range(1..=20), rng.gen_range(1..=20));
        let slope = format!("{}/{}", s * b + t * cb, s * a + t * ca);
        let mut mutated = cert.clone();
        mutated["witnesses"][rng.gen_range(0..count)]["slope"] = json!(slope);
        let out = certify(dir.path(), &mutated);
        assert!(!out.status.success(), "slope {slope} accepted");
        let v: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(v["error"]["kind"], json!("certificate_rejected"));
    }
    // Replacing a witness by a genuine strip element is caught by the budget.
    let mut mutated = cert.clone();
    mutated["witnesses"][0] = cert["nearest_competitor"].clone();
    assert!(!certify(dir.path(), &mutated).status.success());
}

#[test]
fn pp_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    // v at vertex 1 with v = β·w.
    let phi = json!({"free": 1, "bound": 1, "types": [1, 3], "entries": [
        {"row": 1, "col": 1, "terms": [{"coeff": "1", "path": []}]},
        {"row": 1, "col": 2, "terms": [{"coeff": "-1", "path": ["beta"]}]}
    ]});
    let zero = json!({"free": 1, "bound": 0, "types": [1], "entries": [
        {"row": 1, "col": 1, "terms": [{"coeff": "1", "path": []}]}
    ]});
    let phi_path = write(dir.path(), "phi.json", &phi);
    let zero_path = write(dir.path(), "zero.json", &zero);
    let free = ok(&["pp-free", &phi_path]);
    assert_eq!(free["module"]["dims"], json!([1, 1, 1, 0, 0, 0]));
    assert_eq!(free["vertex"], json!(1));
    let m = write(dir.path(), "m.json", &free["module"]);
    assert_eq!(ok(&["pp-eval", &phi_path, &m])["dimension"], json!(1));
    assert_eq!(ok(&["pp-eval", &zero_path, &m])["dimension"], json!(0));
    assert_eq!(ok(&["pp-pair", &phi_path, &zero_path, &m])["open"], json!(true));
    assert_eq!(error_kind(&["pp-pair", &zero_path, &phi_path, &m]), "contract_violation");
    assert_eq!(ok(&["hom", &m, &m])["hom"], json!(1));
    assert_eq!(ok(&["ext", &m, &m]), json!({"euler": 1, "ext1": 0, "ext2": 0, "hom": 1}));
}

#[test]
fn output_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tubular"))
        .args(["euler", "--x", "h0", "--y", "hinf"])
        .env("TUBULAR_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let saved = std::fs::read(dir.path().join("euler.json")).unwrap();
    assert_eq!(serde_json::from_slice::<Value>(&saved).unwrap(), json!(2));
}
