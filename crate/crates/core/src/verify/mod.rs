//! The proposition harness. Every check compares the library against an
//! independent oracle from [`oracles`] and reports counts compared, a verdict
//! and, on failure, the first witness found in canonical order.

use std::fmt::{self, Display};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::series::LawReport;

mod algebra_checks;
pub mod fixtures;
pub mod oracles;
mod series_checks;
mod simplicial_checks;
mod tree_checks;

/// Bounds and seed shared by every check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    pub seed: u64,
    pub max_arity: usize,
    pub max_vertices: usize,
    pub max_carrier: usize,
    pub truncation: usize,
    /// Random instances for the randomized checks.
    pub instances: usize,
    /// Record wall-clock per check. Off by default so reports stay
    /// byte-identical between runs.
    pub timing: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0x5eed,
            max_arity: 4,
            max_vertices: 5,
            max_carrier: 4,
            truncation: 3,
            instances: 200,
            timing: false,
        }
    }
}

/// Verdict of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub claim: String,
    pub oracle: String,
    pub passed: bool,
    pub compared: u64,
    pub summary: Vec<String>,
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub config: Config,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl Report {
    fn new(config: &Config, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            config: config.clone(),
            checks,
            passed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{:width$}  result  compared  oracle", "check")?;
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            write!(f, "{:width$}  {verdict:6}  {:>8}  {}", c.name, c.compared, c.oracle)?;
            if let Some(ms) = c.millis {
                write!(f, "  ({ms} ms)")?;
            }
            writeln!(f)?;
            for line in &c.summary {
                writeln!(f, "{:width$}    {line}", "")?;
            }
            if let Some(w) = &c.witness {
                writeln!(f, "{:width$}    witness: {w}", "")?;
            }
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "{passed}/{} checks passed", self.checks.len())
    }
}

/// Running comparison counter for one check.
#[derive(Default, Debug)]
pub(crate) struct Tally {
    compared: u64,
    failed: bool,
    witness: Option<String>,
    summary: Vec<String>,
}

impl Tally {
    pub(crate) fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) -> bool {
        self.compared += 1;
        if !ok {
            self.failed = true;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
        ok
    }

    pub(crate) fn eq<T: PartialEq + fmt::Debug>(&mut self, what: impl Display, got: T, want: T) -> bool {
        let ok = got == want;
        self.check(ok, || format!("{what}: got {got:?}, expected {want:?}"))
    }

    pub(crate) fn law(&mut self, what: impl Display, r: &LawReport) -> bool {
        self.compared += r.checked as u64;
        if !r.passed() {
            self.failed = true;
            if self.witness.is_none() {
                self.witness = Some(format!("{what}: {}", r.failures[0]));
            }
        }
        r.passed()
    }

    pub(crate) fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    /// Folds in a sub-tally computed independently (for example on another
    /// thread), keeping the earlier witness.
    pub(crate) fn absorb(&mut self, other: Tally) {
        self.compared += other.compared;
        self.failed |= other.failed;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self.summary.extend(other.summary);
    }

    pub(crate) fn passed(&self) -> bool {
        !self.failed
    }
}

type CheckFn = fn(&Config) -> Result<Tally>;

/// A registered check: name, the claim it tests and its oracle.
pub struct CheckSpec {
    pub name: &'static str,
    pub claim: &'static str,
    pub oracle: &'static str,
    run: CheckFn,
}

pub static CHECKS: &[CheckSpec] = &[
    CheckSpec {
        name: "tree-counts",
        claim: "tree enumeration counts",
        oracle: "Catalan recurrence and segment DP",
        run: tree_checks::tree_counts,
    },
    CheckSpec {
        name: "coproduct-decomposition",
        claim: "Q(A+B) = Q_e(A,B) * Q A with split/regraft",
        oracle: "segment DP over essential markings",
        run: tree_checks::coproduct_decomposition,
    },
    CheckSpec {
        name: "essential-equalizer",
        claim: "doubling maps fix exactly the trivial trees",
        oracle: "direct relabeling comparison",
        run: tree_checks::essential_equalizer,
    },
    CheckSpec {
        name: "star-monoid",
        claim: "unit, associativity and S(A*B) = S A . S B",
        oracle: "three-level trees and closed-form sizes",
        run: series_checks::star_monoid,
    },
    CheckSpec {
        name: "kan-evaluation",
        claim: "evaluation at units and representables",
        oracle: "closed-form sizes and Yoneda classes",
        run: series_checks::kan_evaluation,
    },
    CheckSpec {
        name: "coeq-products",
        claim: "reflexive coequalizers commute with finite products",
        oracle: "breadth-first components",
        run: series_checks::coeq_products,
    },
    CheckSpec {
        name: "free-theory",
        claim: "grafting laws and the universal property of F A",
        oracle: "generator placements and segment DP",
        run: tree_checks::free_theory,
    },
    CheckSpec {
        name: "functoriality",
        claim: "series act functorially on arity morphisms",
        oracle: "corrupted-table control",
        run: series_checks::functoriality,
    },
    CheckSpec {
        name: "improper-example",
        claim: "two algebras; the empty map is a non-effective mono",
        oracle: "unit-law unfolding and equalizer testing",
        run: algebra_checks::improper_example,
    },
    CheckSpec {
        name: "effective-mono",
        claim: "effective monomorphism verdicts",
        oracle: "equalizer testing against all small algebras",
        run: algebra_checks::effective_mono_check,
    },
    CheckSpec {
        name: "bar-construction",
        claim: "bar identities and augmentation to the pushout",
        oracle: "set-level pushout and level-size formula",
        run: algebra_checks::bar_construction,
    },
    CheckSpec {
        name: "adjunction",
        claim: "induction is left adjoint to restriction; End classifies structures",
        oracle: "hom-set counting",
        run: algebra_checks::adjunction,
    },
    CheckSpec {
        name: "relative-composition",
        claim: "relative composition with regular and induced bimodules",
        oracle: "free algebra sizes",
        run: algebra_checks::relative_composition_check,
    },
    CheckSpec {
        name: "clone-laws",
        claim: "clone laws of shipped theories",
        oracle: "closed-form value sizes",
        run: algebra_checks::clone_laws,
    },
    CheckSpec {
        name: "degeneracy-freeness",
        claim: "freeness of degeneracy diagrams and s-free maps",
        oracle: "binomial counts of nondegenerate simplices",
        run: simplicial_checks::degeneracy_freeness,
    },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

fn execute(spec: &CheckSpec, cfg: &Config) -> CheckResult {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(|| (spec.run)(cfg)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(invalid(format!("check panicked: {msg}")))
    });
    let tally = outcome.unwrap_or_else(|e| {
        let mut t = Tally::default();
        t.check(false, || format!("error: {e}"));
        t
    });
    CheckResult {
        name: spec.name.to_string(),
        claim: spec.claim.to_string(),
        oracle: spec.oracle.to_string(),
        passed: tally.passed(),
        compared: tally.compared,
        summary: tally.summary,
        witness: tally.witness,
        millis: cfg.timing.then(|| start.elapsed().as_millis() as u64),
    }
}

/// Runs one check by name.
pub fn run(name: &str, cfg: &Config) -> Result<Report> {
    let spec = CHECKS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| invalid(format!("unknown check `{name}`; known: {}", check_names().join(", "))))?;
    Ok(Report::new(cfg, vec![execute(spec, cfg)]))
}

/// Runs every check concurrently; the report keeps registry order.
pub fn run_all(cfg: &Config) -> Report {
    let results: Vec<CheckResult> = CHECKS.par_iter().map(|spec| execute(spec, cfg)).collect();
    Report::new(cfg, results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check_is_an_error() {
        assert!(run("no-such-check", &Config::default()).is_err());
    }

    #[test]
    fn tally_keeps_first_witness() {
        let mut t = Tally::default();
        t.eq("a", 1, 1);
        t.eq("b", 1, 2);
        t.eq("c", 3, 4);
        assert!(!t.passed());
        assert_eq!(t.compared, 3);
        assert_eq!(t.witness.as_deref(), Some("b: got 1, expected 2"));
    }
}
