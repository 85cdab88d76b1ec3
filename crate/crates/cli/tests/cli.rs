use std::process::{Command, Output};

use serde_json::Value;
use theoria_core::graded::{Arity, Profile, Sort};
use theoria_core::signature::Signature;
use theoria_core::trees::{enumerate_trees, Tree};
use theoria_core::verify::fixtures;

fn theoria(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theoria")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = theoria(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut args = args.to_vec();
    args.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&args)).unwrap()
}

fn catalan(n: u64) -> u64 {
    (0..n).fold(1, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

#[test]
fn binary_tree_counts_are_catalan() {
    let rows = json(&["trees", "count", "--max-arity", "6"]);
    let counts: Vec<u64> = rows.as_array().unwrap().iter().map(|r| r["count"].as_u64().unwrap()).collect();
    let want: Vec<u64> = (0..=6).map(|k| if k == 0 { 0 } else { catalan(k - 1) }).collect();
    assert_eq!(counts, want);
    assert!(rows.as_array().unwrap().iter().all(|r| r["truncated"] == false));
}

#[test]
fn empty_signature_has_only_trivial_trees() {
    let rows = json(&["trees", "count", "--sig", "empty", "--max-arity", "3"]);
    for r in rows.as_array().unwrap() {
        let trivial = r["profile"] == "*<-(*)";
        assert_eq!(r["count"].as_u64().unwrap(), trivial as u64, "{r}");
    }
}

#[test]
fn dot_export_round_trips() {
    let sig = fixtures::binary();
    let text = stdout(&["trees", "enumerate", "--profile", "*<-(*,*,*,*)", "--format", "dot"]);
    let parsed: Vec<Tree> = text
        .split("digraph")
        .filter(|chunk| !chunk.trim().is_empty())
        .map(|chunk| Tree::from_dot(&format!("digraph{chunk}"), &sig).unwrap())
        .collect();
    let p = Profile::new(Sort(0), Arity::uniform(Sort(0), 4));
    assert_eq!(parsed, enumerate_trees(&sig, &p, 5).unwrap().trees);
}

#[test]
fn free_binary_series_at_three_points() {
    assert_eq!(stdout(&["series", "evaluate", "free:binary", "3"]), "*: 9 elements\n");
    let x = json(&["series", "evaluate", "free:binary", "3"]);
    assert_eq!(x["*"].as_array().unwrap().len(), 9);
}

#[test]
fn unit_composition_changes_nothing() {
    let free = json(&["series", "compose", "free:binary", "unit", "--max-arity", "3"]);
    let sizes: Vec<u64> = free.as_array().unwrap().iter().map(|r| r["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![0, 1, 4, 9]);
    let left = json(&["series", "compose", "unit", "free:binary", "--max-arity", "3"]);
    assert_eq!(left, free);
}

#[test]
fn binary_star_binary() {
    let s = json(&["series", "star", "binary", "binary"]);
    let ops = s["ops"].as_array().unwrap();
    assert_eq!(ops.len(), 1);
    assert_eq!(ops[0]["inputs"].as_array().unwrap().len(), 4);
}

#[test]
fn improper_theory_counterexample() {
    let found = stdout(&["algebra", "enumerate", "--theory", "improper", "--max-carrier", "3"]);
    assert!(found.contains("2 algebras up to isomorphism"), "{found}");
    let v = json(&["algebra", "effective-mono", "--theory", "improper", "--source", "free:0", "--target", "free:1"]);
    assert_eq!(v["mono"], true);
    assert_eq!(v["effective"], false);
}

#[test]
fn pointed_wedge_sizes() {
    for a in 0..3 {
        for b in 0..3 {
            let (x, v) = (format!("free:{a}"), format!("free:{b}"));
            let p = json(&["algebra", "pushout", "--x", &x, "--v", &v]);
            let elements = p["carrier"]["elements"]["*"].as_array().unwrap().len();
            assert_eq!(elements, a + b + 1, "wedge of {a} and {b}");
        }
    }
}

#[test]
fn bar_level_sizes() {
    let args = ["algebra", "bar", "--x", "free:2", "--u", "free:1", "--v", "free:1", "--f", "x0,c", "--g", "x0,c"];
    let b = json(&args);
    // |X| + |V| + n|U| minus the n + 1 identified basepoints.
    let levels: Vec<u64> = b["levels"].as_array().unwrap().iter().map(|n| n.as_u64().unwrap()).collect();
    assert_eq!(levels, (0..=3).map(|n| 3 + 2 + 2 * n - (n + 1)).collect::<Vec<_>>());
    assert_eq!(b["identities"], true);
    assert_eq!(b["coequalizer"], b["pushout"]);
    assert_eq!(b["bijective"], true);
}

#[test]
fn signature_and_algebra_files() {
    let dir = tempfile::tempdir().unwrap();
    let sig_path = dir.path().join("sig.json");
    let sig = Signature::single_sorted(&[("m", 2), ("e", 0)]);
    std::fs::write(&sig_path, sig.to_json()).unwrap();
    let rows = json(&["trees", "count", "--sig", sig_path.to_str().unwrap(), "--profile", "*<-()", "--max-vertices", "3"]);
    // `e` and `m(e,e)`; larger closed trees need more vertices.
    assert_eq!(rows[0]["count"], 2);
    assert_eq!(rows[0]["truncated"], true);

    let alg = json(&["algebra", "pushout", "--x", "free:1", "--v", "free:1"]);
    let alg_path = dir.path().join("wedge.json");
    std::fs::write(&alg_path, alg.to_string()).unwrap();
    let c = json(&["algebra", "coproduct", alg_path.to_str().unwrap(), "free:0"]);
    assert_eq!(c["carrier"]["elements"]["*"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: [&[&str]; 6] = [
        &["check", "no-such-check"],
        &["trees", "count", "--sig", "no-such-signature"],
        &["trees", "count", "--format", "dot"],
        &["--max-arity", "0", "trees", "count"],
        &["algebra", "bar", "--x", "free:2", "--u", "free:1", "--v", "free:1", "--f", "x0"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = theoria(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"sorts\": [").unwrap();
    assert_eq!(theoria(&["trees", "count", "--sig", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn single_check_report() {
    let out = stdout(&["check", "improper-example"]);
    assert!(out.starts_with("check"), "{out}");
    assert!(out.ends_with("1/1 checks passed\n"));
    let r = json(&["check", "tree-counts", "--seed", "7"]);
    assert_eq!(r["passed"], true);
    assert_eq!(r["config"]["seed"], 7);
    assert_eq!(r["checks"][0]["name"], "tree-counts");
}
