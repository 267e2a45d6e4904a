use std::process::{Command, Output};

use serde_json::Value;

fn whr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whr")).args(args).output().expect("spawn whr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hurwitz_two_transpositions() {
    let o = whr(&["hurwitz", "--N", "2", "--profiles", "[[2],[2]]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn hurwitz_json_envelope() {
    let o = whr(&["hurwitz", "--N", "3", "--profiles", "[[3],[3],[3]]", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["schema-version"], 1);
    assert_eq!(doc["command"], "hurwitz");
    assert_eq!(doc["passed"], true);
    assert!(doc["config"]["weight"].is_object());
}

#[test]
fn malformed_g_is_a_usage_error() {
    for g in ["2+z", "1+", "(1+z"] {
        let o = whr(&["--g", g, "tau"]);
        assert_eq!(o.status.code(), Some(2), "G = {g}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn malformed_config_file_is_a_usage_error() {
    let dir = std::env::temp_dir().join(format!("whr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"weight\": 3}").unwrap();
    let o = whr(&["--config", path.to_str().unwrap(), "curve"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_round_trips() {
    let dir = std::env::temp_dir().join(format!("whr-cli-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = whr(&["--g", "(1+z)(1+2z)", "--s", "s1", "--gamma", "3", "curve"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let path = dir.join("cfg.json");
    std::fs::write(&path, doc["config"].to_string()).unwrap();
    let again = whr(&["--config", path.to_str().unwrap(), "curve"]);
    assert_eq!(stdout(&again), stdout(&out));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--gamma", "4", "correlators", "--n", "2", "--connected"];
    let (a, b) = (whr(&args), whr(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let thr = whr(&["--threads", "4", "--gamma", "4", "correlators", "--n", "2", "--connected"]);
    let strip = |s: &str| {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v["config"]["threads"] = Value::Null;
        v
    };
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&thr)));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("whr-cli-out-{}.json", std::process::id()));
    let o = whr(&["--out", path.to_str().unwrap(), "tau", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "tau");
}

#[test]
fn validate_quick_passes() {
    let o = whr(&["validate", "all", "--profile", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = doc["result"]["checks"].as_array().unwrap();
    assert!(checks.len() > 10);
    assert!(checks.iter().any(|c| c["identity"] == "recursion vs connected correlators"));
}
