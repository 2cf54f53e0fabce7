use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pcluster(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcluster"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

const PATH3: &str = "p cep 3 2\ne 1 2\ne 2 3\n";
const TRIANGLE: &str = "c a triangle\np cep 3 3\ne 1 2\ne 1 3\ne 2 3\n";

#[test]
fn solve_reports_yes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p3.graph", PATH3);
    let out = pcluster(&["solve", &g, "--p", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["answer"], "YES");
    assert_eq!(v["cost"], 1);
    assert_eq!(v["clusters"].as_array().unwrap().len(), 2);
    assert!(v["stats"].get("wall_time_ms").is_none());
}

#[test]
fn solve_reports_no_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.graph", TRIANGLE);
    let out = pcluster(&["solve", &g, "--p", "3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["answer"], "NO");
    // Three singletons cost exactly three deletions.
    let out = pcluster(&["solve", &g, "--p", "3", "--k", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("YES cost 3\n"));
}

#[test]
fn at_most_mode_allows_fewer_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.graph", TRIANGLE);
    let exact = pcluster(&["solve", &g, "--p", "2", "--k", "1"]);
    assert_eq!(exact.status.code(), Some(1));
    let at_most = pcluster(&["solve", &g, "--p", "2", "--k", "0", "--mode", "at-most"]);
    assert_eq!(at_most.status.code(), Some(0));
    assert_eq!(json(&at_most)["cost"], 0);
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p3.graph", PATH3);
    assert_eq!(pcluster(&["solve", &g, "--p", "0", "--k", "1"]).status.code(), Some(2));
    assert_eq!(pcluster(&["solve", &g, "--p", "1", "--k", "-1"]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.graph", "p cep 3 2\ne 1 2\ne 2 9\n");
    let out = pcluster(&["solve", &bad, "--p", "1", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let missing = dir.path().join("missing.graph");
    let out = pcluster(&["oracle", missing.to_str().unwrap(), "--p", "1", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_refuses_large_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "big.graph", "p cep 15 0\n");
    let out = pcluster(&["oracle", &g, "--p", "1", "--k", "200"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_and_oracle_agree_on_generated_graphs() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..6u64 {
        let gen = pcluster(&[
            "generate",
            "planted",
            "--n",
            "8",
            "--p",
            "3",
            "--k",
            "4",
            "--seed",
            &seed.to_string(),
        ]);
        assert_eq!(gen.status.code(), Some(0));
        let g = write(dir.path(), "g.graph", &String::from_utf8(gen.stdout).unwrap());
        for k in [0, 2, 4, 6] {
            let args = |cmd: &'static str| {
                let k = k.to_string();
                let out = pcluster(&[cmd, &g, "--p", "3", "--k", &k]);
                (out.status.code(), json(&out)["cost"].clone())
            };
            assert_eq!(args("solve"), args("oracle"), "seed {seed} k {k}");
        }
    }
}

#[test]
fn cuts_lists_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p3.graph", PATH3);
    let out = pcluster(&["cuts", &g, "--k", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.ends_with(" 0") || l.ends_with(" 1")));
    let out = pcluster(&["cuts", &g, "--k", "0", "--count-only"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "count 2\n");
    let out = pcluster(&["cuts", &g, "--k", "1", "--count-only", "--p", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("count 6\n"), "{text}");
    assert!(text.contains("within_bound true"));
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p3.graph", PATH3);
    let out = pcluster(&["solve", &g, "--p", "2", "--k", "1", "--timing"]);
    assert!(json(&out)["stats"]["wall_time_ms"].is_u64());
}

#[test]
fn reduce_eth_writes_graph_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n");
    let asg = write(dir.path(), "f.asg", "v 1 -2 3 0\n");
    let prefix = dir.path().join("out");
    let out = pcluster(&[
        "reduce",
        "eth",
        &cnf,
        "--out",
        prefix.to_str().unwrap(),
        "--witness",
        &asg,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert_eq!(summary["budget"], 28);
    assert_eq!(summary["witness_verified"], true);
    let graph = std::fs::read_to_string(dir.path().join("out.graph")).unwrap();
    assert!(graph.starts_with("p cep 36 "));
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(sidecar["role_map"].as_array().unwrap().len(), 36);
    assert_eq!(sidecar["witness"]["cost"], 28);
    assert!(sidecar["max_degree"].as_u64().unwrap() <= 5);
}

#[test]
fn reduce_rejects_falsifying_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n");
    let asg = write(dir.path(), "f.asg", "1 2 3 0\n");
    let prefix = dir.path().join("out");
    let out = pcluster(&[
        "reduce",
        "eth",
        &cnf,
        "--out",
        prefix.to_str().unwrap(),
        "--witness",
        &asg,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reduce_multivariate_stays_compressed_when_large() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 3 1\n1 2 3 0\n");
    let asg = write(dir.path(), "f.asg", "1 -2 -3 0\n");
    let prefix = dir.path().join("mv");
    let out = pcluster(&[
        "reduce",
        "multivariate",
        &cnf,
        "--p",
        "1",
        "--k",
        "9",
        "--out",
        prefix.to_str().unwrap(),
        "--witness",
        &asg,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert_eq!(summary["faithful"], true);
    assert_eq!(summary["target_clusters"], 6);
    assert!(summary["graph_file"].is_null());
    assert_eq!(summary["witness_verified"], true);
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("mv.json")).unwrap()).unwrap();
    assert_eq!(sidecar["witness"]["cost"], sidecar["budget"]);
    assert!(!dir.path().join("mv.graph").exists());
}

#[test]
fn reduce_multivariate_checks_hypotheses() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 5 1\n1 2 3 0\n");
    let out = pcluster(&["reduce", "multivariate", &cnf, "--p", "1", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_is_seeded() {
    for args in [
        vec!["generate", "gnp", "--n", "9", "--prob", "0.4", "--seed", "3"],
        vec!["generate", "clusters", "--n", "9", "--p", "3", "--seed", "3"],
        vec!["generate", "cnf", "--vars", "6", "--clauses", "8", "--seed", "3"],
    ] {
        let a = pcluster(&args);
        let b = pcluster(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
    assert_eq!(
        pcluster(&["generate", "gnp", "--n", "4", "--prob", "0.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cut_listing_examples() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.graph", TRIANGLE);
    let empty = write(dir.path(), "empty.graph", "p cep 3 0\n");
    let lines = |args: &[&str]| String::from_utf8(pcluster(args).stdout).unwrap().lines().count();
    assert_eq!(lines(&["cuts", &tri, "--k", "1"]), 2);
    assert_eq!(lines(&["cuts", &tri, "--k", "2"]), 8);
    assert_eq!(lines(&["cuts", &empty, "--k", "0"]), 8);
}

#[test]
fn multivariate_budget_matches_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "tiny.cnf", "p cnf 3 1\n1 2 3 0\n");
    let prefix = dir.path().join("tiny");
    let out = pcluster(&[
        "reduce",
        "multivariate",
        &cnf,
        "--p",
        "1",
        "--k",
        "100",
        "--epsilon",
        "1",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("tiny.json")).unwrap()).unwrap();
    let n = sidecar["regularized"]["vars"].as_u64().unwrap() as u128;
    let m = sidecar["regularized"]["clauses"].as_u64().unwrap() as u128;
    let p = 1u128;
    let l = 1000 * (p + n) / p;
    assert_eq!(sidecar["parameters"]["L"].as_u64().unwrap() as u128, l);
    let per = (6 * n + 9 * m) / (6 * p);
    let expected = (6 * n + 36 * m) * l + 6 * p * (per * (per - 1) / 2) + (6 * n + 27 * m) - 2 * 3 * n - 2 * 9 * m;
    assert_eq!(sidecar["budget"].as_u64().unwrap() as u128, expected);
    assert_eq!(json(&out)["budget"], sidecar["budget"]);
}

#[test]
fn eth_graph_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(dir.path(), "f.cnf", "p cnf 4 2\n1 -2 3 0\n-1 2 4 0\n");
    let prefix = dir.path().join("e");
    let out = pcluster(&["reduce", "eth", &cnf, "--out", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("e.graph")).unwrap();
    let g = pcluster::format::parse_graph(&text).unwrap();
    assert_eq!(pcluster::format::write_graph(&g), text);
    assert_eq!(json(&out)["budget"], 14 * json(&out)["clauses"].as_u64().unwrap());
}
