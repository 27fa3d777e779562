//! The acceptance gate: one line per criterion, each an exact identity
//! with a wall-clock budget. Every criterion delegates to the library's
//! verification suite so the CLI, the tests, and the suite agree.

use std::time::{Duration, Instant};

use qskew::model::UqModel;
use qskew::verify::{run_suite, VerifyOptions};

struct Criterion {
    number: u32,
    description: &'static str,
    tags: &'static [&'static str],
    budget: Duration,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        number: 1,
        description: "quantum Serre relations normalize to zero",
        tags: &["serre"],
        budget: Duration::from_secs(1),
    },
    Criterion {
        number: 2,
        description: "PBW monomials of degree <= 6 are linearly independent",
        tags: &["pbw"],
        budget: Duration::from_secs(10),
    },
    Criterion {
        number: 3,
        description: "(e_i, Delta_j) q-commutation table; central z1, z2; Delta polynomial algebra",
        tags: &["delta-table"],
        budget: Duration::from_secs(10),
    },
    Criterion {
        number: 4,
        description: "Delta identities across the X, Y, Z, T bases in the torus",
        tags: &["cauchon"],
        budget: Duration::from_secs(5),
    },
    Criterion {
        number: 5,
        description: "torus center: exhaustive lattice check and exponent basis",
        tags: &["center"],
        budget: Duration::from_secs(30),
    },
    Criterion {
        number: 6,
        description: "embedding oracle: 200 random multiplicativity and membership round trips",
        tags: &["embed"],
        budget: Duration::from_secs(60),
    },
    Criterion {
        number: 7,
        description: "localized commutation formula for Z4^-k Z1, k = 1..5",
        tags: &["localization"],
        budget: Duration::from_secs(1),
    },
    Criterion {
        number: 8,
        description: "derivation pipeline: 100 random exact decompositions with multiplier ladder",
        tags: &["derivation"],
        budget: Duration::from_secs(300),
    },
    Criterion {
        number: 9,
        description: "D(z2) = z z2 with z polynomial in z1, z2 for the same derivations",
        tags: &["z2"],
        budget: Duration::from_secs(300),
    },
    Criterion {
        number: 10,
        description: "automorphisms: flip relations, involution, scalar conjugation, Delta scalars",
        tags: &["automorphism"],
        budget: Duration::from_secs(10),
    },
    Criterion {
        number: 11,
        description: "derivation module basis: zero and weight derivations give the indicator table",
        tags: &["hh1"],
        budget: Duration::from_secs(5),
    },
];

#[test]
fn acceptance() {
    let model = UqModel::shared();
    let mut failures = Vec::new();

    for c in CRITERIA {
        let start = Instant::now();
        let mut pass = true;
        let mut witness = String::new();
        for tag in c.tags {
            let report = run_suite(
                model,
                &VerifyOptions {
                    only: Some(tag.to_string()),
                    ..Default::default()
                },
            );
            assert!(
                !report.checks.is_empty(),
                "criterion {} matched no checks for tag {tag}",
                c.number
            );
            if !report.pass() {
                pass = false;
                for check in &report.checks {
                    if let Some(w) = &check.witness {
                        witness.push_str(&format!("{}: {w}; ", check.id));
                    }
                }
            }
        }
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let status = if pass && in_budget { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2}: {status} [{:>7} ms / budget {:>4} s] {}",
            c.number,
            elapsed.as_millis(),
            c.budget.as_secs(),
            c.description
        );
        if !pass {
            failures.push(format!("criterion {}: {witness}", c.number));
        }
        if !in_budget {
            failures.push(format!(
                "criterion {}: exceeded budget ({} ms > {} s)",
                c.number,
                elapsed.as_millis(),
                c.budget.as_secs()
            ));
        }
    }

    // criterion 12: the full suite is fast and byte-deterministic
    {
        let start = Instant::now();
        let opts = VerifyOptions {
            seed: 7,
            ..Default::default()
        };
        let first = run_suite(model, &opts);
        let second = run_suite(model, &opts);
        let a = serde_json::to_string(&first.to_json()).unwrap();
        let b = serde_json::to_string(&second.to_json()).unwrap();
        let elapsed = start.elapsed();
        let pass = first.pass() && a == b;
        let in_budget = elapsed <= Duration::from_secs(600);
        let status = if pass && in_budget { "PASS" } else { "FAIL" };
        println!(
            "criterion 12: {status} [{:>7} ms / budget  600 s] full suite deterministic under a fixed seed",
            elapsed.as_millis()
        );
        if !first.pass() {
            failures.push("criterion 12: full suite failed".to_string());
        }
        if a != b {
            failures.push("criterion 12: reports differ between runs".to_string());
        }
        if !in_budget {
            failures.push("criterion 12: exceeded the 10 minute budget".to_string());
        }
    }

    assert!(failures.is_empty(), "acceptance failures:\n{}", failures.join("\n"));
}
