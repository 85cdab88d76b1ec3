//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p theoria-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use theoria_core::algebra::{effective_mono, enumerate_algebras, free_algebra};
use theoria_core::graded::{Arity, GradedMap, GradedSet, Profile, Sort, SortSet};
use theoria_core::trees::enumerate_trees;
use theoria_core::verify::{self, fixtures, Config};

type Outcome = Result<String, String>;

struct Line {
    number: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn criterion(number: usize, title: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Line {
    let start = Instant::now();
    let result = f();
    let took = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = limit {
        if took > limit {
            passed = false;
            detail = format!("{detail}; took {took:.1?}, limit {limit:?}");
        }
    }
    Line {
        number,
        title,
        passed,
        detail,
    }
}

/// Runs named harness checks and fails with the first witness.
fn checks(names: &[&str]) -> Outcome {
    let cfg = Config::default();
    let mut compared = 0;
    for name in names {
        let report = verify::run(name, &cfg).map_err(|e| e.to_string())?;
        let c = &report.checks[0];
        if !c.passed {
            return Err(format!("{name}: {}", c.witness.clone().unwrap_or_default()));
        }
        compared += c.compared;
    }
    Ok(format!("{} ({compared} comparisons)", names.join(", ")))
}

fn catalan(n: usize) -> u64 {
    let mut c = vec![1u64; n + 1];
    for m in 1..=n {
        c[m] = (0..m).map(|i| c[i] * c[m - 1 - i]).sum();
    }
    c[n]
}

fn tree_counts() -> Outcome {
    let sig = fixtures::binary();
    let mut got = Vec::new();
    for leaves in 2..=8 {
        let p = Profile::new(Sort(0), Arity::uniform(Sort(0), leaves));
        let en = enumerate_trees(&sig, &p, leaves - 1).map_err(|e| e.to_string())?;
        if en.truncated {
            return Err(format!("{leaves} leaves: enumeration truncated"));
        }
        got.push(en.trees.len() as u64);
    }
    let want: Vec<u64> = (1..=7).map(catalan).collect();
    if got != want || want != [1, 2, 5, 14, 42, 132, 429] {
        return Err(format!("counts {got:?}, expected {want:?}"));
    }
    Ok(format!("counts {got:?}"))
}

fn improper_example() -> Outcome {
    let theory = fixtures::improper(3);
    let (found, _) = enumerate_algebras(&theory, 3).map_err(|e| e.to_string())?;
    if found.len() != 2 {
        return Err(format!("{} algebras on carriers <= 3, expected 2", found.len()));
    }
    let single = SortSet::single();
    let empty = free_algebra(&theory, &GradedSet::with_sizes(&single, &[0])).map_err(|e| e.to_string())?.algebra;
    let point = free_algebra(&theory, &GradedSet::with_sizes(&single, &[1])).map_err(|e| e.to_string())?.algebra;
    if (empty.carrier().total_len(), point.carrier().total_len()) != (0, 1) {
        return Err("free algebras on 0 and 1 are not the empty set and the point".into());
    }
    let f = GradedMap::new(empty.carrier().clone(), point.carrier().clone(), vec![vec![]]).map_err(|e| e.to_string())?;
    let v = effective_mono(&empty, &point, &f).map_err(|e| e.to_string())?;
    if !v.mono || v.effective {
        return Err(format!("verdict mono={} effective={}, expected a non-effective mono", v.mono, v.effective));
    }
    checks(&["improper-example"])?;
    Ok("2 algebras; the empty map is a monomorphism and is not effective".into())
}

fn full_harness() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_theoria");
    let limit = Duration::from_secs(120);
    let run = || {
        let start = Instant::now();
        let out = Command::new(bin)
            .args(["check", "all", "--seed", "24301"])
            .output()
            .map_err(|e| format!("cannot run theoria: {e}"))?;
        match start.elapsed() {
            took if took > limit => Err(format!("check all took {took:.1?}, limit {limit:?}")),
            _ => Ok(out),
        }
    };
    let (first, second) = (run()?, run()?);
    for out in [&first, &second] {
        if out.status.code() != Some(0) {
            let text = String::from_utf8_lossy(&out.stdout);
            let failing: Vec<&str> = text.lines().filter(|l| l.contains("FAIL") || l.contains("witness")).collect();
            return Err(format!("exit {:?}: {}", out.status.code(), failing.join(" | ")));
        }
    }
    if first.stdout != second.stdout {
        return Err("reruns with the same seed differ".into());
    }
    let text = String::from_utf8_lossy(&first.stdout);
    Ok(format!("exit 0, byte-identical rerun, {}", text.lines().last().unwrap_or("")))
}

#[test]
fn acceptance_criteria() {
    let s = Duration::from_secs;
    let lines = vec![
        criterion(1, "tree counts are Catalan numbers", Some(s(5)), tree_counts),
        criterion(2, "coproduct decomposition", Some(s(30)), || checks(&["coproduct-decomposition"])),
        criterion(3, "doubling maps fix exactly the trivial trees", Some(s(10)), || checks(&["essential-equalizer"])),
        criterion(4, "star product is a monoidal product", None, || checks(&["star-monoid"])),
        criterion(5, "evaluation and coequalizers", None, || checks(&["kan-evaluation", "coeq-products"])),
        criterion(6, "two-object theory with a non-effective mono", Some(s(5)), improper_example),
        criterion(7, "degeneracy freeness and s-free maps", None, || checks(&["degeneracy-freeness"])),
        criterion(8, "bar construction", None, || checks(&["bar-construction"])),
        criterion(9, "adjunction and endomorphism theories", None, || checks(&["adjunction"])),
        criterion(10, "full harness is green and reproducible", None, full_harness),
    ];
    for l in &lines {
        println!("{} {:2}  {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.number, l.title, l.detail);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.passed).map(|l| l.number).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
