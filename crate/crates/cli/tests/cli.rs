use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn matchlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matchlab"))
        .args(args)
        .env("MATCHLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const FOUR_TRIPLES: &str = "6 3\n3 5 6\n1 2 3\n2 4 6\n1 4 5\n";

#[test]
fn sample_is_canonical_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.edges");
    let out = out.to_str().unwrap();
    let args = ["sample", "--n", "10", "--k", "2", "--p", "0.5", "--seed", "20240601", "--out", out];
    assert!(matchlab(&args).status.success());
    let first = std::fs::read_to_string(out).unwrap();
    assert!(matchlab(&args).status.success());
    assert_eq!(first, std::fs::read_to_string(out).unwrap());

    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("10 2"));
    let edges: Vec<Vec<u32>> = lines
        .map(|l| l.split(' ').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(edges.len(), 27);
    assert!(edges.windows(2).all(|w| w[0] < w[1]));
    assert!(edges.iter().all(|e| e[0] < e[1]));
}

#[test]
fn oracle_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "f.edges", FOUR_TRIPLES);
    let v = json(&matchlab(&["oracle", "--s", "1", &file]));
    assert_eq!(v["size"], 4);
    let v = json(&matchlab(&["oracle", "--s", "1", "--verdict", &file]));
    assert_eq!(v["optimum_size"], 4);
    assert_eq!(v["max_trivial_size"], 2);
    assert_eq!(v["conclusion_holds"], false);
}

#[test]
fn covers_decompose_certify() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "f.edges", FOUR_TRIPLES);
    let fan = json(&matchlab(&["cover", "--alg", "fan", &file]));
    assert!(!fan["members"].as_array().unwrap().is_empty());
    let dec = json(&matchlab(&["decompose", "--t", "1", &file]));
    assert_eq!(dec["t"], 1);
    let cert = json(&matchlab(&["certify", &file, "--avoid", "7"]));
    assert_eq!(cert["nontrivial_count"], 1);
    assert_eq!(cert["parts"][0]["class"]["kind"], "non_trivial");

    // the complete 3-graph on [8] is 2-resilient
    let mut text = String::from("8 3\n");
    for a in 1..=8 {
        for b in a + 1..=8 {
            for c in b + 1..=8 {
                text.push_str(&format!("{a} {b} {c}\n"));
            }
        }
    }
    let k8 = write(dir.path(), "k8.edges", &text);
    let branch = json(&matchlab(&["cover", "--alg", "branch", "--t", "2", &k8]));
    assert!(branch["members"].as_array().unwrap().len() as u64 <= branch["declared_bound"].as_u64().unwrap());
}

#[test]
fn regime_and_diag() {
    let r = json(&matchlab(&["regime", "--n", "1600", "--k", "2", "--s", "1", "--t", "1"]));
    assert_eq!(r["thm1"]["n_ok"], true);
    let d = json(&matchlab(&["diag", "--n", "30", "--k", "3", "--s", "2", "--p", "0.01"]));
    assert_eq!(d["ordered_count"], "24036012000");
    assert_eq!(d["matching_count"], "4006002000");
}

#[test]
fn k2_envelope_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("k2.csv");
    let out = matchlab(&[
        "k2", "--n", "10", "--s", "2", "--p", "1", "--trials", "2", "--csv", csv.to_str().unwrap(),
    ]);
    let v = json(&out);
    assert_eq!(v["f"], 17);
    assert_eq!(v["trials"][0]["x"], 17);
    assert_eq!(v["within_fraction"], 1.0);
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 3);

    // n < 2s+2 is refused unless the oracle is forced
    let refused = matchlab(&["k2", "--n", "5", "--s", "2", "--p", "1"]);
    assert!(!refused.status.success());
    let forced = json(&matchlab(&["k2", "--n", "5", "--s", "2", "--p", "1", "--force-oracle"]));
    assert_eq!(forced["trials"][0]["x"], 10);
    assert_eq!(forced["trials"][0]["method"], "oracle");
}

fn campaign_config(dir: &Path, name: &str, body: &str) -> String {
    let prefix = dir.join(name);
    let text = body.replace("PREFIX", prefix.to_str().unwrap());
    write(dir, &format!("{name}.json"), &text)
}

fn strip_timing(jsonl: &str) -> Vec<Value> {
    jsonl
        .lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("wall_time_ms");
            v
        })
        .collect()
}

#[test]
fn campaign_is_deterministic_and_summary_matches() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"kind": "thm1", "grid": {"n": [6, 7], "k": [2], "s": [1], "p": [1.0, 0.6]},
                   "trials": 4, "master_seed": 5, "output": "PREFIX", "audit_budget": 5}"#;
    let a = campaign_config(dir.path(), "a", body);
    let b = campaign_config(dir.path(), "b", body);
    let sa = json(&matchlab(&["campaign", "--config", &a]));
    json(&matchlab(&["campaign", "--config", &b]));
    let ja = std::fs::read_to_string(dir.path().join("a.jsonl")).unwrap();
    let jb = std::fs::read_to_string(dir.path().join("b.jsonl")).unwrap();
    assert_eq!(strip_timing(&ja), strip_timing(&jb));
    assert_eq!(ja.lines().count(), 16);

    // summary fractions equal a recount of the jsonl
    let reports = strip_timing(&ja);
    for cell in sa["cells"].as_array().unwrap() {
        let idx = cell["cell"].as_u64().unwrap();
        let mine: Vec<_> = reports.iter().filter(|r| r["cell"] == idx).collect();
        let ok = mine.iter().filter(|r| r["success"] == true).count();
        assert_eq!(cell["success_fraction"].as_f64().unwrap(), ok as f64 / mine.len() as f64);
    }
    // p = 1 cells hold deterministically
    for cell in sa["cells"].as_array().unwrap().iter().filter(|c| c["p"] == 1.0) {
        assert_eq!(cell["success_fraction"], 1.0);
    }
    let csv = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn campaign_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind": "thm1", "grid": {"n": [], "k": [2], "s": [1]},
        "trials": 1, "master_seed": 1, "output": "x"}"#);
    assert_eq!(matchlab(&["campaign", "--config", &bad]).status.code(), Some(2));

    let floor = campaign_config(
        dir.path(),
        "floor",
        r#"{"kind": "k2", "grid": {"n": [10], "k": [2], "s": [2], "epsilon": [0.0], "p": [0.5]},
            "trials": 3, "master_seed": 1, "output": "PREFIX", "success_floor": 1.0, "audit_budget": 0}"#,
    );
    assert_eq!(matchlab(&["campaign", "--config", &floor]).status.code(), Some(3));
}

#[test]
fn trial_errors_are_isolated_unless_strict() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"kind": "k2", "grid": {"n": [5, 8], "k": [2], "s": [2], "p": [1.0]},
                   "trials": 2, "master_seed": 1, "output": "PREFIX", "audit_budget": 0, "strict": STRICT}"#;
    let lenient = campaign_config(dir.path(), "lenient", &body.replace("STRICT", "false"));
    let summary = json(&matchlab(&["campaign", "--config", &lenient]));
    assert_eq!(summary["cells"][0]["errors"], 2);
    assert_eq!(summary["cells"][1]["errors"], 0);
    let jsonl = std::fs::read_to_string(dir.path().join("lenient.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 4);

    let strict = campaign_config(dir.path(), "strict", &body.replace("STRICT", "true"));
    let out = matchlab(&["campaign", "--config", &strict]);
    assert!(!out.status.success());
}
