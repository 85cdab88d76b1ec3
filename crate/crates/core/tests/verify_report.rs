use theoria_core::verify::{check_names, run, run_all, Config, CHECKS};

fn quick() -> Config {
    Config {
        max_arity: 2,
        max_vertices: 2,
        max_carrier: 2,
        truncation: 1,
        instances: 5,
        ..Config::default()
    }
}

#[test]
fn reports_are_reproducible() {
    let cfg = quick();
    for name in ["tree-counts", "coeq-products", "improper-example"] {
        let (a, b) = (run(name, &cfg).unwrap(), run(name, &cfg).unwrap());
        assert!(a.passed, "{a}");
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_string(), b.to_string());
        assert!(!a.to_json().contains("millis"));
    }
}

#[test]
fn run_all_keeps_registry_order() {
    let report = run_all(&quick());
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, check_names());
    assert_eq!(names.len(), CHECKS.len());
    assert!(report.passed, "{report}");
    assert!(report.checks.iter().all(|c| c.compared > 0 && c.witness.is_none()));
}

#[test]
fn timing_is_opt_in() {
    let cfg = Config { timing: true, ..quick() };
    let report = run("tree-counts", &cfg).unwrap();
    assert!(report.checks[0].millis.is_some());
    assert!(report.to_json().contains("millis"));
}
