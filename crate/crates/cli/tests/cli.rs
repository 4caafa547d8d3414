use std::process::{Command, Output};

use serde_json::Value;

fn pegball(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pegball"))
        .args(args)
        .env_remove("PEGBALL_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = pegball(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn distance_examples() {
    let o = pegball(&["distance", "--model", "rd", "3412"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2");
    assert_eq!(stdout(&pegball(&["distance", "456123"])), "3");
    assert_eq!(
        stdout(&pegball(&["distance", "--model", "prd", "4213"])),
        "3"
    );
    assert_eq!(stdout(&pegball(&["peg-distance", "2+ 1+"])), "3");
    assert_eq!(
        stdout(&pegball(&["peg-distance", "--model", "prd", "3. 1- 2."])),
        "3"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(
        pegball(&["distance", "--model", "rd", ""]).status.code(),
        Some(1)
    );
    assert_eq!(pegball(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(pegball(&["distance", "3x12"]).status.code(), Some(2));
    assert_eq!(pegball(&["peg-distance", "2 1"]).status.code(), Some(2));
    assert_eq!(
        pegball(&["distance", "--limit", "12", "12"]).status.code(),
        Some(3)
    );
    assert_eq!(
        pegball(&["enumerate", "--k", "1", "--n-max", "13", "--method", "grid"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(pegball(&["--help"]).status.code(), Some(0));
}

#[test]
fn generate_and_bases() {
    let o = pegball(&["generate", "--model", "prd", "--k", "2"]);
    assert_eq!(stdout(&o), "2+ 1- 3+\n2- 1+ 3+\ncount=2");
    let o = pegball(&["basis", "--model", "prd", "--k", "1"]);
    let text = stdout(&o);
    assert!(text.contains("count=3"));
    assert!(text.contains("verified=true"));
    let v = json(&["peg-basis", "--model", "prd", "--k", "0", "--max-len", "2"]);
    assert_eq!(
        v["result"]["members"],
        serde_json::json!(["1-", "2+ 1.", "2. 1+"])
    );
    // the default search goes to length 4, which adds the two sporadic all-dot members
    let v = json(&["peg-basis", "--model", "prd", "--k", "0"]);
    assert_eq!(
        v["result"]["members"],
        serde_json::json!(["1-", "2+ 1.", "2. 1+", "2. 4. 1. 3.", "3. 1. 4. 2."])
    );
}

#[test]
fn json_envelope_and_round_trip() {
    let v = json(&["generate", "--k", "2"]);
    for key in ["command", "model", "k", "result", "elapsed_ms", "limits"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["command"], "generate");
    assert_eq!(v["model"], "rd");
    assert_eq!(v["k"], 2);
    assert_eq!(v["limits"]["standard"], 9);
    for g in v["result"]["generators"].as_array().unwrap() {
        let s = g.as_str().unwrap();
        let p: pegball_core::PegPermutation = s.parse().unwrap();
        assert_eq!(p.to_string(), s);
    }
    let v = json(&["basis", "--model", "prd", "--k", "2"]);
    for m in v["result"]["members"].as_array().unwrap() {
        let s = m["perm"].as_str().unwrap();
        let p: pegball_core::Permutation = s.parse().unwrap();
        assert_eq!(p.to_string(), s);
    }
}

#[test]
fn membership_and_grids() {
    assert_eq!(
        stdout(&pegball(&["member", "--k", "1", "1432"])),
        "inside distance=1 generator=1+ 2- 3+"
    );
    let v = json(&["member", "--k", "2", "45231"]);
    assert_eq!(v["result"]["verdict"], "outside");
    assert_eq!(v["result"]["basis_element"], "4 5 2 3 1");
    assert_eq!(
        stdout(&pegball(&["grid-member", "1+ 2- 3+", "1432"])),
        "true"
    );
    assert_eq!(
        stdout(&pegball(&["grid-member", "1+ 2- 3+", "2143"])),
        "false"
    );
    assert_eq!(stdout(&pegball(&["peg", "2317654"])), "2+ 1. 3-");
}

#[test]
fn enumerate_methods() {
    for method in ["bfs", "grid", "avoid"] {
        let v = json(&[
            "enumerate",
            "--model",
            "prd",
            "--k",
            "2",
            "--n-max",
            "6",
            "--method",
            method,
        ]);
        assert_eq!(
            v["result"]["counts"],
            serde_json::json!([1, 2, 5, 10, 17, 26]),
            "{method}"
        );
    }
}

#[test]
fn verify_published_suite_and_mutations() {
    let o = pegball(&["verify", "--suite", "paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for m in pegball_core::Claims::MUTATIONS.iter().map(|(m, _)| *m) {
        let o = pegball(&["verify", "--suite", "paper", "--mutate", m]);
        assert_eq!(o.status.code(), Some(4), "mutation {m} went unnoticed");
    }
    assert_eq!(
        pegball(&["verify", "--mutate", "nonsense"]).status.code(),
        Some(1)
    );
}

#[test]
fn cache_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = pegball(&["cache", "build", "--n", "5", "--cache-dir", d]);
    assert!(o.status.success());
    assert!(dir.path().join("rd-standard-5.dist").exists());
    let o = pegball(&[
        "cache",
        "build",
        "--model",
        "prd",
        "--n",
        "3",
        "--kind",
        "peg",
        "--cache-dir",
        d,
    ]);
    assert!(o.status.success());
    let listed = stdout(&pegball(&["cache", "list", "--cache-dir", d]));
    assert!(listed.contains("prd-peg-3.dist"));
    let o = Command::new(env!("CARGO_BIN_EXE_pegball"))
        .args(["distance", "45123"])
        .env("PEGBALL_CACHE", d)
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "2");
    assert_eq!(
        stdout(&pegball(&["cache", "clear", "--cache-dir", d])),
        "removed 2"
    );
    assert_eq!(pegball(&["cache", "list"]).status.code(), Some(1));
}
