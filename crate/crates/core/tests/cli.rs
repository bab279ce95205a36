//! End-to-end checks of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybrid-sched"))
}

fn write(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const ONE_TASK: &str = r#"{"m":1,"k":1,"tasks":[{"id":0,"cpu":4,"gpu":2}],"edges":[]}"#;
const CHAIN3: &str = r#"{"m":2,"k":1,"tasks":[
    {"id":0,"cpu":1,"gpu":3},{"id":1,"cpu":1,"gpu":3},{"id":2,"cpu":1,"gpu":3}],
    "edges":[[0,1],[1,2]]}"#;

#[test]
fn solve_writes_schedule_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "one.json", ONE_TASK);
    let out = dir.path().join("sched.json");
    let output = bin()
        .args(["solve", "--instance"])
        .arg(&instance)
        .args(["--rounding", "hlpb", "--b", "auto", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let diagnostics: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(diagnostics["makespan"], 2.0);
    assert_eq!(diagnostics["lp_bound"], 2.0);
    let schedule: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(schedule["makespan"], 2.0);
    assert_eq!(schedule["assignments"][0]["pool"], "gpu");
}

#[test]
fn solve_rejects_small_b_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "one.json", ONE_TASK);
    let output = bin()
        .args(["solve", "--instance"])
        .arg(&instance)
        .args(["--b", "1.5"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("b must be >= 2"), "{stderr}");
}

#[test]
fn solve_empty_instance_makespan_zero() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "empty.json", r#"{"m":2,"k":1,"tasks":[],"edges":[]}"#);
    let output = bin().args(["solve", "--instance"]).arg(&instance).output().unwrap();
    assert!(output.status.success());
    let diagnostics: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(diagnostics["makespan"], 0.0);
}

#[test]
fn verify_flags_overlap_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "chain.json", CHAIN3);
    // Both of the first two tasks on cpu-0 at time 0, and the precedence
    // 0 -> 1 broken as well.
    let schedule = write(
        dir.path(),
        "broken.json",
        r#"{"makespan":3,"assignments":[
            {"id":0,"pool":"cpu","machine":0,"start":0},
            {"id":1,"pool":"cpu","machine":0,"start":0},
            {"id":2,"pool":"cpu","machine":0,"start":2}]}"#,
    );
    let output = bin()
        .args(["verify", "--instance"])
        .arg(&instance)
        .arg("--schedule")
        .arg(&schedule)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["ok"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn oracle_reports_exact_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(dir.path(), "chain.json", CHAIN3);
    let output = run(&["oracle", "--instance", chain.to_str().unwrap()]);
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["exact_opt"], 3.0);

    let one = write(dir.path(), "one.json", ONE_TASK);
    let output = run(&["oracle", "--instance", one.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["exact_opt"], 2.0);
    assert_eq!(report["lp_bound"], 2.0);
}

#[test]
fn oracle_caps_exceeded_is_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "one.json", ONE_TASK);
    let output = bin()
        .args(["oracle", "--instance"])
        .arg(&instance)
        .args(["--max-tasks", "0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn bench_empty_dir_emits_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    let csv = dir.path().join("out.csv");
    let output = bin()
        .args(["bench", "--dir"])
        .arg(&corpus)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("instance_id,status,n,m,k,b,lp_bound"));
}

#[test]
fn bench_dir_rows_satisfy_ratio_bound() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    for seed in 0..4 {
        let out = corpus.join(format!("inst-{seed}.json"));
        let status = bin()
            .args([
                "generate", "random", "--tasks", "20", "--layers", "3", "--edge-prob", "0.3",
                "--m", "3", "--k", "2", "--seed",
            ])
            .arg(seed.to_string())
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let csv = dir.path().join("out.csv");
    assert!(bin()
        .args(["bench", "--dir"])
        .arg(&corpus)
        .arg("--csv")
        .arg(&csv)
        .status()
        .unwrap()
        .success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[1], "ok");
        let ratio_hlpb: f64 = cols[9].parse().unwrap();
        let theoretical: f64 = cols[11].parse().unwrap();
        assert!(ratio_hlpb <= theoretical + 1e-6);
    }
}

#[test]
fn generate_qpartite_and_certify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("red.json");
    let graph = dir.path().join("graph.json");
    assert!(bin()
        .args([
            "generate", "qpartite", "--q", "3", "--Q", "3", "--n", "6", "--epsilon", "0.11",
            "--delta", "0.16", "--edge-prob", "0.4", "--seed", "9",
        ])
        .arg("--out")
        .arg(&instance)
        .arg("--graph-out")
        .arg(&graph)
        .status()
        .unwrap()
        .success());
    let schedule = dir.path().join("yes.json");
    let output = bin()
        .args(["certify", "yes-schedule", "--instance"])
        .arg(&instance)
        .arg("--graph")
        .arg(&graph)
        .arg("--out")
        .arg(&schedule)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    // The emitted schedule passes the verifier.
    let status = bin()
        .args(["verify", "--instance"])
        .arg(&instance)
        .arg("--schedule")
        .arg(&schedule)
        .output()
        .unwrap();
    assert!(status.status.success());
}

#[test]
fn solve_dump_lp_and_gantt() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "one.json", ONE_TASK);
    let lp = dir.path().join("model.lp");
    let gantt = dir.path().join("gantt.csv");
    assert!(bin()
        .args(["solve", "--instance"])
        .arg(&instance)
        .arg("--dump-lp")
        .arg(&lp)
        .arg("--gantt")
        .arg(&gantt)
        .output()
        .unwrap()
        .status
        .success());
    let lp_text = std::fs::read_to_string(&lp).unwrap();
    assert!(lp_text.to_lowercase().contains("minimize"), "{lp_text}");
    let gantt_text = std::fs::read_to_string(&gantt).unwrap();
    assert!(gantt_text.starts_with("machine,task,start,end"));
}
