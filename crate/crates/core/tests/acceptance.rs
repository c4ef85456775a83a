//! The twelve acceptance criteria. Every check compares coefficients exactly;
//! a criterion passes only when each of its checks certified something and
//! found no mismatch.

use std::process::ExitCode;
use std::time::Instant;

use vertex_smash::lattice::{cocycle_check, standard_cocycle, Lattice};
use vertex_smash::report::Status;
use vertex_smash::suites::{run_suite_filtered, SuiteConfig};
use vertex_smash::Window;

fn cfg(lattice: &str) -> SuiteConfig {
    SuiteConfig { lattice: lattice.into(), ..SuiteConfig::default() }
}

fn wide(lattice: &str) -> SuiteConfig {
    SuiteConfig { window: Window { lo: -8, hi: 8 }, ..cfg(lattice) }
}

/// Runs the named checks of a suite and returns a failure description, if any.
fn run(c: &SuiteConfig, suite: &str, ids: &[&str]) -> Option<String> {
    let keep = |id: &str| ids.is_empty() || ids.iter().any(|x| id == format!("{suite}.{x}"));
    let report = match run_suite_filtered(c, suite, keep) {
        Ok(r) => r,
        Err(e) => return Some(format!("{suite}: {e}")),
    };
    if report.checks.is_empty() || (!ids.is_empty() && report.checks.len() != ids.len()) {
        return Some(format!("{suite}: expected checks {ids:?}, ran {}", report.checks.len()));
    }
    report
        .checks
        .iter()
        .find(|r| r.status != Status::Pass || r.certified == 0)
        .map(|r| format!("{} [{}] {:?}: {}", r.id, c.lattice, r.status, r.witness))
}

fn first(parts: impl IntoIterator<Item = Option<String>>) -> Option<String> {
    parts.into_iter().flatten().next()
}

fn cocycles() -> Option<String> {
    for name in ["a1", "a2", "hyperbolic"] {
        let l = Lattice::builtin(name).unwrap();
        let ck = cocycle_check(&l, &standard_cocycle(&l), 3);
        if let Some(v) = ck.violation {
            return Some(format!("{name}: {v}"));
        }
        if ck.checked == 0 {
            return Some(format!("{name}: nothing checked"));
        }
    }
    None
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Box<dyn Fn() -> Option<String>>);
    let criteria: Vec<Criterion> = vec![
        (
            "1 heisenberg commutators on A1 and A2, weight <= 5, modes in [-4,4]",
            Box::new(|| first(["a1", "a2"].map(|l| run(&cfg(l), "heisenberg", &["commutators"])))),
        ),
        (
            "2 alpha_minus makes B_h a B_h-module vertex algebra on [-6,6]^2",
            Box::new(|| run(&cfg("a1"), "heisenberg", &["module", "module_derivative"])),
        ),
        (
            "3 Delta embeds M(1) into B_h # B_h, weight <= 4 on [-8,8], with mode identities",
            Box::new(|| run(&wide("a1"), "heisenberg", &["m1_embedding", "m1_injective", "mode_identities"])),
        ),
        ("4 standard cocycles at radius 3 on A1, A2, hyperbolic", Box::new(cocycles)),
        (
            "5 Y(e_a,x) = E^-(-a,x) e_a on A1 and A2",
            Box::new(|| first(["a1", "a2"].map(|l| run(&cfg(l), "lattice", &["e_minus_form"])))),
        ),
        (
            "6 Phi_a is a pseudo-endomorphism and Phi_a Phi_b = Phi_{a+b}",
            Box::new(|| {
                first([
                    run(&cfg("a1"), "lattice-smash", &["phi_pend", "phi_module"]),
                    run(&cfg("a1"), "lattice", &["phi_multiplicative"]),
                    run(&cfg("a1"), "pseudo", &["phi_pend"]),
                ])
            }),
        ),
        (
            "7 pi embeds V_L into B_{L,eps} # B_L on [-8,8]; 10 weak associativity triples with l <= 20",
            Box::new(|| run(&wide("a1"), "lattice-smash", &["vl_embedding", "weak_assoc", "vl_locality"])),
        ),
        (
            "8 smash product axioms and subalgebras for B_h # B_h and B_{L,eps} # B_L",
            Box::new(|| {
                first([
                    run(&cfg("a1"), "heisenberg", &["smash_axioms"]),
                    run(&cfg("a1"), "lattice-smash", &["smash_axioms"]),
                ])
            }),
        ),
        ("9 pseudo-derivations, inner singular parts, mirror", Box::new(|| run(&cfg("a1"), "pseudo", &[]))),
        ("10 coproduct solver: primitive, group-like, square", Box::new(|| run(&cfg("a1"), "coproduct", &[]))),
        (
            "11 V_P is a B_{L,eps} # B_L-module: 10 weak associativity triples with l <= 20",
            Box::new(|| run(&cfg("a1"), "modules", &["vp_weak_assoc", "vp_vacuum"])),
        ),
        (
            "12 widening by 4 changes no certified coefficient",
            Box::new(|| {
                first(
                    ["heisenberg", "lattice", "lattice-smash", "modules"]
                        .map(|s| run(&cfg("a1"), s, &["widening"])),
                )
            }),
        ),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let start = Instant::now();
        let outcome = f();
        let ms = start.elapsed().as_millis();
        match outcome {
            None => println!("PASS criterion {name} ({ms} ms)"),
            Some(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({ms} ms): {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
