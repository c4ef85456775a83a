use vertex_smash::report::{Report, Status};
use vertex_smash::suites::{load_lattice, run_suite, SuiteConfig, SUITES};
use vertex_smash::Window;

fn strip(r: &Report) -> Vec<(String, Status, usize, String)> {
    r.checks.iter().map(|c| (c.id.clone(), c.status, c.certified, c.witness.clone())).collect()
}

#[test]
fn results_do_not_depend_on_threads() {
    let one = SuiteConfig { threads: Some(1), ..SuiteConfig::default() };
    let two = SuiteConfig { threads: Some(2), ..SuiteConfig::default() };
    for suite in ["pseudo", "coproduct"] {
        let a = run_suite(&one, suite).unwrap();
        let b = run_suite(&two, suite).unwrap();
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.exit_code(), 0, "{}", a.to_text());
    }
}

#[test]
fn narrow_window_is_undecidable_not_failing() {
    let cfg = SuiteConfig { window: Window { lo: 0, hi: 0 }, ..SuiteConfig::default() };
    for suite in ["heisenberg", "pseudo", "coproduct", "modules"] {
        let r = run_suite(&cfg, suite).unwrap();
        assert!(r.checks.iter().all(|c| c.status != Status::Fail), "{}", r.to_text());
    }
    assert_eq!(run_suite(&cfg, "heisenberg").unwrap().exit_code(), 3);
}

#[test]
fn another_seed_also_passes() {
    let cfg = SuiteConfig { seed: 7, ..SuiteConfig::default() };
    assert_eq!(run_suite(&cfg, "modules").unwrap().status(), Status::Pass);
}

#[test]
fn bad_configurations_are_rejected() {
    assert!(run_suite(&SuiteConfig::default(), "nope").is_err());
    let cfg = SuiteConfig { window: Window { lo: 2, hi: 1 }, ..SuiteConfig::default() };
    assert!(run_suite(&cfg, "pseudo").is_err());
    let cfg = SuiteConfig { threads: Some(0), ..SuiteConfig::default() };
    assert!(run_suite(&cfg, "pseudo").is_err());
    assert!(load_lattice("/nonexistent/lattice.json").is_err());
    assert_eq!(SUITES.len(), 6);
}

#[test]
fn lattice_from_json() {
    let dir = std::env::temp_dir().join(format!("vs-lattice-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("u.json");
    std::fs::write(&p, r#"{"rank": 2, "gram": [[0, 1], [1, 0]]}"#).unwrap();
    let (l, _) = load_lattice(p.to_str().unwrap()).unwrap();
    assert_eq!(l.rank(), 2);
    std::fs::write(&p, r#"{"rank": 1, "gram": [[1]]}"#).unwrap();
    assert!(load_lattice(p.to_str().unwrap()).is_err());
}
