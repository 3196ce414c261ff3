use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn jaf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jaf")).args(args).current_dir(dir).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn construct_then_verify_albert_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "h3_zorn.json", r#"{"kind": "h3", "composition": {"kind": "zorn"}}"#);
    assert_eq!(jaf(&["construct", "-c", "h3_zorn.json", "-o", "alg.json"], d).status.code(), Some(0));
    let alg: Value = serde_json::from_str(&fs::read_to_string(d.join("alg.json")).unwrap()).unwrap();
    assert_eq!(alg["rank"], 27);
    for name in ["r1.json", "r2.json"] {
        let out = jaf(&["verify", "-a", "alg.json", "--samples", "200", "--seed", "42", "-o", name], d);
        assert_eq!(out.status.code(), Some(0));
    }
    let (r1, r2) = (fs::read(d.join("r1.json")).unwrap(), fs::read(d.join("r2.json")).unwrap());
    assert_eq!(r1, r2, "reports are byte-identical");
    let report: Value = serde_json::from_slice(&r1).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 7);
}

#[test]
fn eval_operations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "diagonal.json", r#"{"kind": "diagonal"}"#);
    assert_eq!(jaf(&["construct", "-c", "diagonal.json", "-o", "diag.json"], d).status.code(), Some(0));
    let inv = jaf(&["eval", "--op", "inverse", "-a", "diag.json", "-x", r#"["1","2","3"]"#], d);
    assert_eq!(json(&inv), serde_json::json!(["1", "1/2", "1/3"]));
    let n = jaf(&["eval", "--op", "norm", "-a", "diag.json", "-x", r#"["1","2","3"]"#], d);
    assert_eq!(json(&n), serde_json::json!("6"));
    let t = jaf(&["eval", "--op", "trace", "-a", "diag.json", "-x", r#"["1","2","3"]"#], d);
    assert_eq!(json(&t), serde_json::json!("6"));
    let s = jaf(&["eval", "--op", "sharp", "-a", "diag.json", "-x", r#"["1","2","3"]"#], d);
    assert_eq!(json(&s), serde_json::json!(["6", "3", "2"]));
    let u = jaf(&["eval", "--op", "u", "-a", "diag.json", "-x", r#"["1","2","3"]"#, "-y", r#"["1","1","1"]"#], d);
    assert_eq!(json(&u), serde_json::json!(["1", "4", "9"]));
    let singular = jaf(&["eval", "--op", "inverse", "-a", "diag.json", "-x", r#"["0","2","3"]"#], d);
    assert_eq!(singular.status.code(), Some(1));
    let fit = jaf(&["fit", "-a", "diag.json", "-x", r#"["1","2","3"]"#], d);
    assert_eq!(json(&fit)["coefficients"], serde_json::json!(["6", "11", "6"]));
}

#[test]
fn peirce_and_gram() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "h3.json", r#"{"kind": "h3", "composition": {"kind": "etale2", "d": -1}, "gamma": ["1", "2", "3"]}"#);
    assert_eq!(jaf(&["construct", "-c", "h3.json", "-o", "alg.json"], d).status.code(), Some(0));
    let mut es = Vec::new();
    for i in 0..3 {
        let mut e = vec!["0"; 9];
        e[i] = "1";
        es.push(e);
    }
    let es = serde_json::to_string(&es).unwrap();
    let p = json(&jaf(&["peirce", "-a", "alg.json", "-e", &es], d));
    let dims: Vec<u64> = p.as_array().unwrap().iter().map(|s| s["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![1, 1, 1, 2, 2, 2]);
    let g = json(&jaf(&["gram", "-a", "alg.json", "-p", "7", "-p", "11"], d));
    assert_eq!(g.as_array().unwrap().len(), 2);
    assert_eq!(g[0]["rank"], 9);
}

#[test]
fn verification_failure_exits_one_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // U_x y = x^2 y on R, except that U_{e} has its coefficient doubled.
    write(d, "bad.json", r#"{"rank": 1, "unit": ["1"], "U": [[0, 0, 0, 0, "2"]]}"#);
    let out = jaf(&["verify", "-a", "bad.json", "--samples", "20", "-o", "report.json"], d);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    let failing = report["checks"].as_array().unwrap().iter().find(|c| c["passed"] == false).unwrap();
    assert!(failing.get("witness").is_some());
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "bad.json", r#"{"kind": "icosahedron"}"#);
    write(d, "broken.json", "{not json");
    assert_eq!(jaf(&["construct", "-c", "bad.json"], d).status.code(), Some(2));
    assert_eq!(jaf(&["construct", "-c", "broken.json"], d).status.code(), Some(2));
    assert_eq!(jaf(&["construct", "-c", "missing.json"], d).status.code(), Some(2));
    assert_eq!(jaf(&["frobnicate"], d).status.code(), Some(2));
    assert_eq!(jaf(&["verify", "-a", "x.json", "--samples", "0"], d).status.code(), Some(2));
    write(d, "zorn.json", r#"{"kind": "h3", "composition": {"kind": "zorn"}}"#);
    jaf(&["construct", "-c", "zorn.json", "-o", "alg.json"], d);
    assert_eq!(jaf(&["verify", "-a", "alg.json", "--mode", "symbolic"], d).status.code(), Some(2));
    assert_eq!(jaf(&["eval", "--op", "norm", "-a", "alg.json", "-x", "[1, 2]"], d).status.code(), Some(2));
}

#[test]
fn symbolic_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "m.json", r#"{"kind": "mat3"}"#);
    jaf(&["construct", "-c", "m.json", "-o", "alg.json"], d);
    let out = jaf(&["verify", "-a", "alg.json", "--mode", "symbolic"], d);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn tits_descriptors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gauss = r#"{"kind": "quadratic", "d": -1}"#;
    write(d, "first.json", r#"{"kind": "first_tits", "algebra": {"kind": "diagonal"}, "beta": 2}"#);
    write(
        d,
        "process.json",
        &format!(r#"{{"kind": "tits_process", "algebra": {{"kind": "diagonal", "ring": {gauss}}}}}"#),
    );
    write(d, "etale.json", r#"{"kind": "etale_process", "e": {"kind": "diagonal"}, "d": 4}"#);
    write(d, "rank1.json", r#"{"kind": "rank1_process", "d": -1}"#);
    for (file, rank) in [("first.json", 9), ("etale.json", 9), ("rank1.json", 3)] {
        let out = jaf(&["construct", "-c", file, "--samples", "30"], d);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["rank"], rank, "{file}");
    }
    write(d, "mat.json", &format!(r#"{{"kind": "tits_process", "algebra": {{"kind": "mat3", "ring": {gauss}}}}}"#));
    let out = jaf(&["construct", "-c", "mat.json", "--samples", "10"], d);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["rank"], 27);
    // The diagonal algebra over Q(i) carries no involution.
    assert_ne!(jaf(&["construct", "-c", "process.json", "--samples", "30"], d).status.code(), Some(0));
}

#[test]
fn picmod_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = jaf(&["picmod", "enumerate", "--which", "lemma7", "--m", "1"], d);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v[0]["expression"], "O^3 \u{2295} [L(-2) \u{2295} L(1)^2] \u{2295} [L(2) \u{2295} L(-1)^2]");
    assert_eq!(v[0]["rank"], 9);

    let out = jaf(&["picmod", "enumerate", "--which", "ex10", "--case", "1", "--param", "m1=0", "--param", "m2=-1"], d);
    assert_eq!(json(&out)[0]["rank"], 27);

    assert_eq!(jaf(&["picmod", "enumerate", "--which", "ex13"], d).status.code(), Some(2));
    assert_eq!(jaf(&["picmod", "enumerate", "--which", "ex12", "--case", "2", "--m", "1"], d).status.code(), Some(2));

    let i = r#"{"context": {"split": false}, "summands": [{"kind": "trace", "ext_deg": 3, "degree": -1}]}"#;
    let l = r#"{"context": {"split": false}, "summands": [{"kind": "line", "base": "X", "degree": 2}]}"#;
    let det = json(&jaf(&["picmod", "det", "-a", i], d));
    assert_eq!(det["expression"], "L(-1)");
    let t = json(&jaf(&["picmod", "tensor", "-a", l, "-b", i], d));
    assert_eq!(t["expression"], "tr(O'(5))");
    let bc = json(&jaf(&["picmod", "base-change", "-a", i], d));
    assert_eq!(bc["expression"], "O'(-1)^3");
    assert_eq!(jaf(&["picmod", "tensor", "-a", i, "-b", i], d).status.code(), Some(2));
}

#[test]
fn export_parts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "s.json", r#"{"kind": "spin"}"#);
    jaf(&["construct", "-c", "s.json", "-o", "alg.json"], d);
    for what in ["cns", "tensor", "gram"] {
        let out = jaf(&["export", "-a", "alg.json", "--what", what], d);
        assert_eq!(out.status.code(), Some(0), "{what}");
    }
    let g = json(&jaf(&["export", "-a", "alg.json", "--what", "gram"], d));
    assert_eq!(g.as_array().unwrap().len(), 3);
}
