use forge_core::poly::BivariatePoly;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

const TRIANGULAR: &str = r#"{"branch":"triangular","k":2,"c":["1"],"lambda":"0"}"#;
const QSHEAR: &str = r#"{"branch":"qshear","m":2,"gamma":"1","beta":["1","1"],"lambda":"0"}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn forge(args: &[&str], dir: &Path) -> Run {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_forge"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn put(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn read_json(dir: &TempDir, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.path().join(name)).unwrap()).unwrap()
}

fn poly(v: &Value) -> BivariatePoly {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn gen_writes_polynomials_and_degrees() {
    let dir = TempDir::new().unwrap();
    put(&dir, "t.json", TRIANGULAR);
    put(&dir, "q.json", QSHEAR);
    let r = forge(&["gen", "--spec", "t.json", "--out", "t.out.json"], dir.path());
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = read_json(&dir, "t.out.json");
    assert_eq!(poly(&v["f1"]), "x + y^2".parse().unwrap());
    assert_eq!(poly(&v["canonical"]["f1"]), "x + y^2".parse().unwrap());
    assert_eq!(v["n"], 3);
    assert_eq!(v["k"], 2);
    assert_eq!(v["deg_h"], 4);

    assert_eq!(forge(&["gen", "--spec", "q.json", "--out", "q.out.json"], dir.path()).code, 0);
    let v = read_json(&dir, "q.out.json");
    assert_eq!(v["n"], 7);
    assert_eq!(v["m"], 2);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    put(&dir, "broken.json", r#"{"branch": "triangular", "k": "#);
    put(&dir, "gamma.json", r#"{"branch":"qshear","m":2,"gamma":"0","beta":["1","1"],"lambda":"0"}"#);
    put(&dir, "extra.json", r#"{"branch":"triangular","k":2,"c":["1"],"lambda":"0","mu":"1"}"#);
    let r = forge(&["gen", "--spec", "broken.json", "--out", "x.json"], dir.path());
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("malformed JSON"), "{}", r.stderr);
    let r = forge(&["gen", "--spec", "gamma.json", "--out", "x.json"], dir.path());
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("gamma"), "{}", r.stderr);
    let r = forge(&["gen", "--spec", "extra.json", "--out", "x.json"], dir.path());
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("mu"), "{}", r.stderr);
    assert_eq!(forge(&["gen", "--spec", "missing.json", "--out", "x.json"], dir.path()).code, 2);
    assert_eq!(forge(&["catalog", "--n-max", "10", "--out", "c.json"], dir.path()).code, 2);
    assert_eq!(forge(&["catalog", "--out", "c.json"], dir.path()).code, 2);
}

#[test]
fn verify_families_and_hand_maps() {
    let dir = TempDir::new().unwrap();
    put(&dir, "q.json", QSHEAR);
    put(&dir, "t.json", r#"{"branch":"triangular","k":3,"c":["1/2","-1/3"],"lambda":"2"}"#);
    put(&dir, "scale.json", r#"{"f1":"2x","f2":"y"}"#);
    put(&dir, "bent.json", r#"{"f1":"x + y^2","f2":"y + x"}"#);

    for spec in ["q.json", "t.json"] {
        let r = forge(&["verify", "--spec", spec, "--out", "v.json"], dir.path());
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert!(r.stdout.starts_with("PASS"));
        let v = read_json(&dir, "v.json");
        assert_eq!(v["pass"], true);
        assert_eq!(v["det"], "1");
    }
    assert_eq!(read_json(&dir, "v.json")["checks"].as_array().unwrap().len(), 2);

    let r = forge(&["verify", "--spec", "scale.json", "--out", "v.json"], dir.path());
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("det = 2"), "{}", r.stderr);
    assert_eq!(read_json(&dir, "v.json")["det"], "2");

    let r = forge(&["verify", "--spec", "bent.json", "--out", "v.json"], dir.path());
    assert_eq!(r.code, 1);
    assert_eq!(poly(&read_json(&dir, "v.json")["det"]), "1 - 2y".parse().unwrap());
}

#[test]
fn verify_qshear_includes_trace() {
    let dir = TempDir::new().unwrap();
    put(&dir, "q.json", QSHEAR);
    assert_eq!(forge(&["verify", "--spec", "q.json", "--out", "v.json"], dir.path()).code, 0);
    let v = read_json(&dir, "v.json");
    assert_eq!(v["trace"]["terms"].as_array().unwrap().len(), 7);
    assert_eq!(v["trace"]["total"], "1x^0y^0");
}

#[test]
fn period_sweep_csv() {
    let dir = TempDir::new().unwrap();
    put(&dir, "t.json", TRIANGULAR);
    let r = forge(&["period", "--spec", "t.json", "--out", "p.csv"], dir.path());
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("over 4 of 4 energies"));
    let text = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("energy,period,period_error,drift,steps"));
    for line in lines {
        let period: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((period - std::f64::consts::TAU).abs() < 1e-8 * std::f64::consts::TAU);
    }
}

#[test]
fn period_negative_control_and_numeric_failure() {
    let dir = TempDir::new().unwrap();
    put(&dir, "cubic.json", r#"{"h":"1/2*x^2 + 1/2*y^2 + x^3"}"#);
    let r = forge(&["period", "--spec", "cubic.json", "--out", "p.csv", "--energies", "0.001,0.01"], dir.path());
    assert_eq!(r.code, 1, "{}", r.stderr);

    // E = 1 lies above the saddle level, so the orbit escapes; the other row is still written.
    let r = forge(&["period", "--spec", "cubic.json", "--out", "p.csv", "--energies", "0.01,1"], dir.path());
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("energy 1e0"), "{}", r.stderr);
    let text = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert_eq!(text.lines().last(), Some("1.0,,,,"));

    put(&dir, "t.json", TRIANGULAR);
    let r = forge(&["period", "--spec", "t.json", "--out", "p.csv", "--energies", "1,0.5"], dir.path());
    assert_eq!(r.code, 2);
}

#[test]
fn catalog_formats() {
    let dir = TempDir::new().unwrap();
    assert_eq!(forge(&["catalog", "--n-max", "11", "--out", "c.csv"], dir.path()).code, 0);
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let n: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    let q: Vec<&str> = rows.iter().filter(|r| r[4] == "true").map(|r| r[0]).collect();
    assert_eq!(n, ["3", "5", "7", "9", "11"]);
    assert_eq!(q, ["7", "11"]);

    assert_eq!(forge(&["catalog", "--n-max", "3", "--out", "c.json"], dir.path()).code, 0);
    let v = read_json(&dir, "c.json");
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["qshear_available"], false);
    assert_eq!(rows[0]["triangular_params"], 2);

    assert_eq!(forge(&["catalog", "--n-max", "19", "--out", "c.json"], dir.path()).code, 0);
    let q: Vec<u64> = read_json(&dir, "c.json")
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["qshear_available"] == true)
        .map(|r| r["n"].as_u64().unwrap())
        .collect();
    assert_eq!(q, [7, 11, 15, 19]);
}

#[test]
fn equiv_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let k4 = r#"{"branch":"triangular","k":4,"c":["1","1","1"],"lambda":"0"}"#;
    put(&dir, "e.json", &format!(r#"{{"a": {k4}, "b": {QSHEAR}, "sample_box": 1, "restarts": 6}}"#));
    let a = forge(&["equiv", "--spec", "e.json", "--out", "a.json", "--seed", "5"], dir.path());
    let b = forge(&["equiv", "--spec", "e.json", "--out", "b.json", "--seed", "5"], dir.path());
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let (ta, tb) = (
        std::fs::read(dir.path().join("a.json")).unwrap(),
        std::fs::read(dir.path().join("b.json")).unwrap(),
    );
    assert_eq!(ta, tb);
    let v = read_json(&dir, "a.json");
    assert_eq!(v["restarts"], 6);
    assert_eq!(v["interpretation"], "evidence, not proof");
    assert!(v["best_residual"].as_f64().unwrap() > 1e-3);

    assert_eq!(forge(&["equiv", "--spec", "e.json", "--out", "r.csv", "--seed", "5"], dir.path()).code, 0);
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);

    put(&dir, "self.json", &format!(r#"{{"a": {QSHEAR}, "b": {QSHEAR}, "restarts": 2, "unit_determinant": true}}"#));
    assert_eq!(forge(&["equiv", "--spec", "self.json", "--out", "s.json"], dir.path()).code, 0);
    assert!(read_json(&dir, "s.json")["best_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    put(&dir, "q.json", QSHEAR);
    for cmd in ["gen", "verify", "period"] {
        let out = |name: &str| {
            let r = forge(&[cmd, "--spec", "q.json", "--out", name], dir.path());
            assert_eq!(r.code, 0, "{cmd}: {}", r.stderr);
            std::fs::read(dir.path().join(name)).unwrap()
        };
        assert_eq!(out("one"), out("two"), "{cmd}");
    }
}

#[test]
fn lemma_tools() {
    let dir = TempDir::new().unwrap();
    put(&dir, "w.json", r#"{"lemma":"degeneracy","p":"(x - 3y)^2","q":"-2(x - 3y)^3"}"#);
    assert_eq!(forge(&["lemma", "--spec", "w.json", "--out", "w.out"], dir.path()).code, 0);
    let v = read_json(&dir, "w.out");
    assert_eq!(poly(&v["witness"]["r"]), "x - 3y".parse().unwrap());
    assert_eq!((v["witness"]["m_prime"].as_u64(), v["witness"]["n_prime"].as_u64()), (Some(2), Some(3)));
    assert_eq!(v["witness"]["c_q"], "-2");

    put(&dir, "none.json", r#"{"lemma":"degeneracy","p":"x^2","q":"y^2"}"#);
    assert_eq!(forge(&["lemma", "--spec", "none.json", "--out", "n.out"], dir.path()).code, 0);
    let v = read_json(&dir, "n.out");
    assert!(v["witness"].is_null());
    assert_eq!(poly(&v["det"]), "4x*y".parse().unwrap());

    put(&dir, "t.json", r#"{"lemma":"transport","beta":"1","h":"x + y"}"#);
    assert_eq!(forge(&["lemma", "--spec", "t.json", "--out", "t.out"], dir.path()).code, 0);
    let v = read_json(&dir, "t.out");
    assert_eq!(poly(&v["p"]), "x*y".parse().unwrap());
    assert_eq!(v["residual"], "0");

    put(&dir, "bad.json", r#"{"lemma":"transport","beta":"1","h":"x + y^2"}"#);
    assert_eq!(forge(&["lemma", "--spec", "bad.json", "--out", "b.out"], dir.path()).code, 2);
    put(&dir, "kind.json", r#"{"lemma":"other"}"#);
    assert_eq!(forge(&["lemma", "--spec", "kind.json", "--out", "b.out"], dir.path()).code, 2);
}
