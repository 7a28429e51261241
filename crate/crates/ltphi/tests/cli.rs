use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ltphi"))
}

fn configs(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn cyc() -> String {
    configs("q3-cyclotomic.json").display().to_string()
}

#[test]
fn lt_axioms_pass_on_defaults() {
    let o = run(&["verify", "--config", &cyc(), "--suite", "lt-axioms"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["verdict"], "PASS");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["verdict"] == "PASS"));
    assert_eq!(r["config"]["phi"]["kind"], "cyclotomic");
}

#[test]
fn unknown_suite_is_a_config_error() {
    let o = run(&["verify", "--config", &cyc(), "--suite", "everything"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corrupted_phi_fails_validation() {
    let mut c: Value = serde_json::from_str(&fs::read_to_string(configs("q3-cyclotomic.json")).unwrap()).unwrap();
    // Linear coefficient 1 is not a uniformizer.
    c["phi"] = serde_json::json!({ "kind": "custom", "coefficients": { "1": 1, "3": 1 } });
    let p = scratch("corrupted-phi.json", &c.to_string());
    let o = run(&["verify", "--config", p.to_str().unwrap(), "--suite", "psi"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["checks"][0]["id"], "validation/phi");
    assert_eq!(r["checks"][0]["verdict"], "FAIL");
}

#[test]
fn schema_violations_exit_2() {
    let mut c: Value = serde_json::from_str(&fs::read_to_string(configs("q3-cyclotomic.json")).unwrap()).unwrap();
    c["colour"] = "blue".into();
    let p = scratch("extra-key.json", &c.to_string());
    assert_eq!(run(&["verify", "--config", p.to_str().unwrap(), "--suite", "psi"]).status.code(), Some(2));
    let p = scratch("truncated.json", "{\"field\": {");
    assert_eq!(run(&["verify", "--config", p.to_str().unwrap(), "--suite", "psi"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--config", "/nonexistent/config.json", "--suite", "psi"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--config", &cyc()]).status.code(), Some(2));
}

#[test]
fn herr_reports_for_the_oracle_modules() {
    for (module, rank) in [("module-trivial.json", 1), ("module-twist-p.json", 0)] {
        let m = configs(module).display().to_string();
        let o = run(&["herr", "--config", &cyc(), "--module", &m]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let r = json(&o);
        assert_eq!(r["0"]["rank"], rank);
        assert_eq!(r["psi_variant"]["0"]["rank"], rank);
        assert_eq!(r["verdict"], "CERTIFIED");
        assert_eq!(r["provenance"]["seed"], 0);
        assert_eq!(r["provenance"]["config"]["precision"], 6);
        assert_eq!(r["provenance"]["module"]["gamma"]["type"], "character");
    }
}

#[test]
fn malformed_modules_exit_2() {
    let p = scratch("module-bad.json", "{\"rank\": 1, \"gamma\": ");
    assert_eq!(run(&["herr", "--config", &cyc(), "--module", p.to_str().unwrap()]).status.code(), Some(2));
    let p = scratch(
        "module-rank.json",
        r#"{"rank": 2, "interval": ["0", "1/2"], "gamma": {"type": "character", "delta_pi": [1], "weight": 0}, "windows": {"herr": 15}, "precision": 6}"#,
    );
    assert_eq!(run(&["herr", "--config", &cyc(), "--module", p.to_str().unwrap()]).status.code(), Some(2));
    let p = scratch(
        "module-window.json",
        r#"{"rank": 1, "interval": ["0", "1/2"], "gamma": {"type": "character", "delta_pi": [1], "weight": 0}, "windows": {"herr": 15, "psi": 30}, "precision": 6}"#,
    );
    assert_eq!(run(&["herr", "--config", &cyc(), "--module", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_record_the_seed() {
    let out = |name: &str| PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let (a, b, c) = (out("psi-a.json"), out("psi-b.json"), out("psi-c.json"));
    for p in [&a, &b] {
        let o = run(&["verify", "--config", &cyc(), "--suite", "psi", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    run(&["verify", "--config", &cyc(), "--suite", "psi", "--out", c.to_str().unwrap()]);
    let ra: Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    let rc: Value = serde_json::from_slice(&fs::read(&c).unwrap()).unwrap();
    assert_eq!((ra["seed"].as_u64(), rc["seed"].as_u64()), (Some(11), Some(0)));
    assert_eq!(ra["config"]["seed"], 11);
    let ids: Vec<&str> = ra["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert!(ids.windows(2).all(|w| w[0] < w[1]));
}
