use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const TEXTBOOK: &str = "1|101\n10|00\n011|11\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chanmem"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Runs the binary with `--out` pointing into `dir` and returns the exit
/// code and the parsed report.
fn run(dir: &TempDir, args: &[&str]) -> (i32, Value, String) {
    let out = dir.path().join(format!("report-{}.json", next_id()));
    let status = bin().args(args).arg("--out").arg(&out).status().unwrap();
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let value = if text.is_empty() { Value::Null } else { serde_json::from_str(&text).unwrap() };
    (status.code().unwrap(), value, text)
}

fn next_id() -> u64 {
    use std::sync::atomic::{AtomicU64, Ordering};
    static N: AtomicU64 = AtomicU64::new(0);
    N.fetch_add(1, Ordering::Relaxed)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn strip_time(report: &str) -> String {
    report.lines().filter(|l| !l.contains("\"wall_time_ms\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn verify_free_defaults_are_clean() {
    let dir = TempDir::new().unwrap();
    let (code, report, _) = run(&dir, &["verify-free", "--depth", "10"]);
    assert_eq!(code, 0);
    assert_eq!(report["outcome"]["word_count"], 2046);
    assert_eq!(report["outcome"]["collisions"], Value::Array(vec![]));
    assert_eq!(report["config"]["pair"]["cos"], "3/5");
}

#[test]
fn verify_free_detects_inverse_axes() {
    let dir = TempDir::new().unwrap();
    let params = write(&dir, "p.json", r#"{"cos":"3/5","sin":"4/5","axis_a":["0","0","1"],"axis_b":["0","0","-1"]}"#);
    let p = params.to_str().unwrap();
    let (code, report, _) = run(&dir, &["verify-free", "--depth", "2", "--params", p, "--unchecked"]);
    assert_eq!(code, 11);
    let scalars = report["outcome"]["scalar_words"].as_array().unwrap();
    assert!(scalars.contains(&Value::from("01")));
    assert_eq!(report["inputs"]["params"]["path"], p);
}

#[test]
fn bad_parameters_exit_with_error() {
    let dir = TempDir::new().unwrap();
    let garbage = write(&dir, "bad.json", "{\"cos\": 3}");
    assert_eq!(run(&dir, &["verify-free", "--params", garbage.to_str().unwrap()]).0, 2);
    // Not on the unit circle.
    assert_eq!(run(&dir, &["verify-free", "--cos", "1/2", "--sin", "3/4"]).0, 2);
    assert_eq!(run(&dir, &["verify-free", "--cos", "3/5", "--sin", "3/5", "--unchecked"]).0, 2);
    assert_eq!(run(&dir, &["verify-free", "--cos", "3/5"]).0, 2);
}

#[test]
fn membership_on_textbook_instance() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tb.txt", TEXTBOOK);
    for mode in ["generic", "structured"] {
        let (code, report, _) =
            run(&dir, &["membership", "--instance", inst.to_str().unwrap(), "--depth", "8", "--mode", mode]);
        assert_eq!(code, 0, "{mode}");
        let m = &report["outcome"]["membership"];
        assert_eq!(m["status"], "Found");
        assert_eq!(m["extracted"], serde_json::json!([1, 3, 2, 3]));
        assert_eq!(m["damping"], "1/256");
        assert_eq!(report["outcome"]["oracle"]["witness"], serde_json::json!([1, 3, 2, 3]));
        assert_eq!(report["outcome"]["agreement"], true);
    }
}

#[test]
fn membership_without_solution_is_exhausted() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "u.txt", "0|1\n");
    let (code, report, _) = run(&dir, &["membership", "--instance", inst.to_str().unwrap(), "--depth", "10"]);
    assert_eq!(code, 10);
    assert_eq!(report["outcome"]["membership"]["status"], "ExhaustedToDepth");
    assert_eq!(report["outcome"]["oracle"]["status"], "ExhaustedToDepth");
    assert_eq!(report["exit"], "exhausted");
}

#[test]
fn membership_mismatch_raises_the_alarm() {
    // Interleaved generators cancel here although no tile word matches.
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.txt", "0|1\n1|0\n");
    let (code, report, _) = run(&dir, &["membership", "--instance", inst.to_str().unwrap(), "--depth", "4"]);
    assert_eq!(code, 12);
    assert_eq!(report["outcome"]["agreement"], false);
    assert_eq!(report["outcome"]["membership"]["extracted"], Value::Null);
}

#[test]
fn solve_pcp_exit_codes() {
    let dir = TempDir::new().unwrap();
    let solvable = write(&dir, "tb.txt", TEXTBOOK);
    let (code, report, _) = run(&dir, &["solve-pcp", "--instance", solvable.to_str().unwrap(), "--depth", "4"]);
    assert_eq!((code, &report["outcome"]["witness"]), (0, &serde_json::json!([1, 3, 2, 3])));
    assert_eq!(run(&dir, &["solve-pcp", "--instance", solvable.to_str().unwrap(), "--depth", "3"]).0, 10);
    let broken = write(&dir, "broken.txt", "01|2\n");
    assert_eq!(run(&dir, &["solve-pcp", "--instance", broken.to_str().unwrap()]).0, 2);
}

#[test]
fn compile_bundle_lists_all_generators() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tb.txt", TEXTBOOK);
    let (code, report, _) = run(&dir, &["compile", "--instance", inst.to_str().unwrap(), "--damping", "1/3"]);
    assert_eq!(code, 0);
    assert_eq!(report["outcome"]["generators"].as_array().unwrap().len(), 6);
    assert_eq!(report["config"]["damping"], "1/3");
    assert_eq!(run(&dir, &["compile", "--instance", inst.to_str().unwrap(), "--damping", "1"]).0, 2);
}

#[test]
fn monotones_on_fixture_graph() {
    let dir = TempDir::new().unwrap();
    let dot = dir.path().join("g.dot");
    let graph = fixture("longest_path_graph.json");
    let (code, report, _) =
        run(&dir, &["monotones", "--graph", graph.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(code, 0);
    let values = &report["outcome"]["base"]["values"];
    assert_eq!(values["sigma"], "1/7");
    assert_eq!(values["tau"], "2");
    assert_eq!(values["c1"], values["c3"]);
    assert_eq!(report["outcome"]["compatible"], serde_json::json!({"Ok": null}));
    assert!(std::fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn reach_and_diff_on_unsolvable_tile() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "u.txt", "0|1\n");
    let i = inst.to_str().unwrap();
    let (code, report, _) = run(&dir, &["reach", "--instance", i, "--depth", "3"]);
    assert_eq!(code, 10);
    assert_eq!(report["outcome"]["queries"][0]["status"], "not_reachable_within_bound");

    let (code, report, _) = run(&dir, &["diff", "--instance", i, "--depth", "3"]);
    assert_eq!(code, 0);
    assert_eq!(report["outcome"]["status"], "Distinct");

    let tele = write(&dir, "t.txt", "0|0\n");
    let (code, report, _) = run(&dir, &["reach", "--instance", tele.to_str().unwrap(), "--depth", "2"]);
    assert_eq!(code, 0);
    assert_eq!(report["outcome"]["queries"][1]["status"], "reachable");
    let (code, report, _) = run(&dir, &["diff", "--instance", tele.to_str().unwrap(), "--depth", "2"]);
    assert_eq!(code, 10);
    assert_eq!(report["outcome"]["status"], "IndistinguishableUpToDepth");
}

#[test]
fn reports_are_identical_across_runs_and_workers() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tb.txt", TEXTBOOK);
    let i = inst.to_str().unwrap();
    let commands: [&[&str]; 3] = [
        &["membership", "--instance", i, "--depth", "8"],
        &["reach", "--instance", i, "--depth", "2"],
        &["diff", "--instance", i, "--depth", "2"],
    ];
    for args in commands {
        let runs: Vec<String> = ["1", "2", "8", "8"]
            .iter()
            .map(|w| {
                let mut a = args.to_vec();
                a.extend(["--workers", w]);
                strip_time(&run(&dir, &a).2)
            })
            .collect();
        assert!(!runs[0].is_empty());
        assert!(runs.iter().all(|r| *r == runs[0]), "{}", args[0]);
    }
}

#[test]
fn stdout_is_the_default_sink() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tb.txt", TEXTBOOK);
    let out = bin().args(["solve-pcp", "--instance", inst.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["command"], "solve-pcp");
    assert_eq!(report["inputs"]["instance"]["sha256"].as_str().unwrap().len(), 64);
}
