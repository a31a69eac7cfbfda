//! End-to-end checks of the `fairsamp` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fairsamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairsamp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fairsamp-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn problems_lists_all_five() {
    let out = fairsamp(&["problems"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in ["a", "b", "c", "d", "e"] {
        assert!(text.contains(&format!("problem {id}:")), "{id} missing");
    }
}

#[test]
fn gridsearch_prints_listed_optimum() {
    let out = fairsamp(&["gridsearch", "--problem", "a"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("energy -2.682"), "got: {text}");
    assert!(text.contains("GSP 0.498"), "got: {text}");
}

#[test]
fn compile_verifies_and_reports_swaps() {
    let out = fairsamp(&[
        "compile",
        "--problem",
        "c",
        "--reduce",
        "--topology",
        "6a",
        "--gateset",
        "ibm",
        "--gridsearch",
        "--verify",
        "--out",
        "-",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("equivalent: true"), "got: {text}");
    let swaps: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("swaps: "))
        .expect("swap count line")
        .trim()
        .parse()
        .unwrap();
    assert!(swaps >= 1);
}

#[test]
fn build_then_simulate_from_file() {
    let dir = temp_dir("pipeline");
    std::fs::create_dir_all(&dir).unwrap();
    let circuit_path = dir.join("circuit.txt");
    let out = fairsamp(&[
        "build",
        "--problem",
        "e",
        "--reduce",
        "--betas",
        "0.38333pi",
        "--gammas",
        "-0.6pi",
        "--out",
        circuit_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let counts_path = dir.join("counts.json");
    let out = fairsamp(&[
        "simulate",
        "--circuit",
        circuit_path.to_str().unwrap(),
        "--shots",
        "4096",
        "--seed",
        "7",
        "--out",
        counts_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = fairsamp(&[
        "metrics",
        "--counts",
        counts_path.to_str().unwrap(),
        "--problem",
        "e",
        "--reduce",
        "--ni",
        "500",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("gsp: 0.99") || text.contains("gsp: 1.0"), "got: {text}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn run_is_byte_identical_per_seed() {
    let dir_a = temp_dir("runa");
    let dir_b = temp_dir("runb");
    for dir in [&dir_a, &dir_b] {
        let out = fairsamp(&[
            "run",
            "--problem",
            "d",
            "--reduce",
            "--gridsearch",
            "--shots",
            "1024",
            "--repeats",
            "4",
            "--seed",
            "11",
            "--ni",
            "200",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["summary.json", "calls.csv", "circuit.txt"] {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    std::fs::remove_dir_all(&dir_a).unwrap();
    std::fs::remove_dir_all(&dir_b).unwrap();
}

#[test]
fn anneal_emits_contract_csv() {
    let out = fairsamp(&[
        "anneal",
        "--problem",
        "e",
        "--times",
        "0,1",
        "--steps-per-unit",
        "25",
        "--shots",
        "1024",
        "--ni",
        "100",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("time,gsp,fairness_shots,energy\n"), "got: {text}");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn compile_accepts_topology_json_file() {
    let dir = temp_dir("topo");
    std::fs::create_dir_all(&dir).unwrap();
    let topo_path = dir.join("ring4.json");
    std::fs::write(
        &topo_path,
        r#"{"name": "ring4", "nodes": [0,1,2,3], "edges": [[0,1],[1,2],[2,3],[3,0]]}"#,
    )
    .unwrap();
    let out = fairsamp(&[
        "compile",
        "--problem",
        "d",
        "--reduce",
        "--betas",
        "0.4",
        "--gammas",
        "-0.2",
        "--topology",
        topo_path.to_str().unwrap(),
        "--verify",
        "--out",
        "-",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("equivalent: true"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn metrics_reports_aggregate_error_from_files() {
    let dir = temp_dir("agg");
    std::fs::create_dir_all(&dir).unwrap();
    let circuit_path = dir.join("compiled.txt");
    let out = fairsamp(&[
        "compile",
        "--problem",
        "e",
        "--reduce",
        "--betas",
        "0.5",
        "--gammas",
        "-0.3",
        "--topology",
        "lnn",
        "--out",
        circuit_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let counts_path = dir.join("counts.json");
    let out = fairsamp(&[
        "simulate",
        "--problem",
        "e",
        "--reduce",
        "--betas",
        "0.5",
        "--gammas",
        "-0.3",
        "--shots",
        "2048",
        "--seed",
        "5",
        "--out",
        counts_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let calib_path = dir.join("calib.json");
    std::fs::write(
        &calib_path,
        r#"{"defaults": {"single": 0.001, "two": 0.01, "readout": 0.02}}"#,
    )
    .unwrap();
    let out = fairsamp(&[
        "metrics",
        "--counts",
        counts_path.to_str().unwrap(),
        "--problem",
        "e",
        "--reduce",
        "--ni",
        "200",
        "--circuit",
        circuit_path.to_str().unwrap(),
        "--calib",
        calib_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("aggregate_error: 0."));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn errors_exit_nonzero_without_partial_output() {
    let dir = temp_dir("err");
    let out = fairsamp(&[
        "run",
        "--problem",
        "a",
        "--topology",
        "lnn", // 4 reduced qubits cannot fit 3 nodes
        "--reduce",
        "--gridsearch",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(!dir.join("summary.json").exists());
    assert!(!dir.join("calls.csv").exists());

    let out = fairsamp(&["gridsearch", "--problem", "z"]);
    assert!(!out.status.success());
}
