//! Acceptance run: one pass/fail line per criterion.
//!
//! Criteria 1 to 10 are read from the suite reports of `verify --seed 0`
//! with default budgets. Each report's own tolerance, measured defect and
//! sample count are checked against the pinned values below, so loosening a
//! suite cannot turn a criterion green. Criterion 11 compares two runs byte
//! for byte.

use std::process::Command;

use serde_json::Value;

struct Pin {
    /// Report name, or a prefix ending in `[` for a family of reports.
    suite: &'static str,
    tolerance: f64,
    min_samples: u64,
}

const fn pin(suite: &'static str, tolerance: f64, min_samples: u64) -> Pin {
    Pin {
        suite,
        tolerance,
        min_samples,
    }
}

fn criteria() -> Vec<(u32, &'static str, Vec<Pin>)> {
    vec![
        (
            1,
            "normalization",
            vec![
                pin("normalization_max_coherent", 1e-12, 15),
                pin("normalization_basis", 0.0, 70),
            ],
        ),
        (
            2,
            "ordering chain",
            vec![
                pin("ordering_coherence", 1e-12, 5000),
                pin("ordering_entanglement", 1e-12, 5000),
            ],
        ),
        (
            3,
            "determinant route vs Schmidt route",
            vec![pin("ent_general", 1e-9, 200)],
        ),
        (
            4,
            "conversion identity",
            vec![
                pin("conversion_pure", 1e-12, 500),
                pin("conversion_mixed", 2e-4, 50),
            ],
        ),
        (
            5,
            "coherence number witness",
            vec![
                pin("coherence_number_mixtures", 1e-6, 1),
                pin("coherence_number_pure_rank", 0.0, 1),
            ],
        ),
        (
            6,
            "C_c^(2) vs C_c bounds",
            vec![
                pin("concurrence_bounds_pure", 1e-12, 5000),
                pin("concurrence_bounds_mixed", 1e-4, 100),
            ],
        ),
        (
            7,
            "C_c meets C_l1 under the phase condition",
            vec![pin("l1_equality", 1e-4, 150)],
        ),
        (
            8,
            "strong monotonicity",
            vec![pin("strong_monotonicity[", 1e-10, 1000)],
        ),
        (9, "convexity", vec![pin("convexity", 1e-8, 200)]),
        (
            10,
            "multislit",
            vec![
                pin("multislit_orthogonal", 1e-12, 5),
                pin("multislit_identical", 1e-4, 5),
                pin("multislit_two_slit", 1e-4, 9),
                pin("multislit_chain", 1e-8, 500),
                pin("multislit_slit_count", 0.0, 4),
            ],
        ),
    ]
}

fn verify_seed0() -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_cohere"))
        .args(["verify", "--seed", "0"])
        .output()
        .expect("binary runs");
    assert!(
        matches!(out.status.code(), Some(0 | 1)),
        "verify failed to run: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

/// Why the matching reports do not meet the pin, if they don't.
fn check(reports: &[Value], p: &Pin) -> Option<String> {
    let matching: Vec<&Value> = reports
        .iter()
        .filter(|r| {
            let name = r["suite"].as_str().unwrap_or("");
            if p.suite.ends_with('[') {
                name.starts_with(p.suite)
            } else {
                name == p.suite
            }
        })
        .collect();
    if matching.is_empty() {
        return Some(format!("{}: no report", p.suite));
    }
    for r in matching {
        let name = r["suite"].as_str().unwrap();
        let tolerance = r["tolerance"].as_f64().unwrap();
        let max_defect = r["max_defect"].as_f64().unwrap();
        let samples = r["samples"].as_u64().unwrap();
        let violations = r["violations"].as_array().map_or(0, Vec::len);
        if tolerance > p.tolerance {
            return Some(format!(
                "{name}: tolerance {tolerance:e} looser than {:e}",
                p.tolerance
            ));
        }
        if samples < p.min_samples {
            return Some(format!("{name}: {samples} samples, need {}", p.min_samples));
        }
        if violations > 0 || r["passed"] != true || max_defect > p.tolerance {
            return Some(format!(
                "{name}: {violations} violations, max defect {max_defect:e}"
            ));
        }
    }
    None
}

fn max_defect(reports: &[Value], pins: &[Pin]) -> f64 {
    reports
        .iter()
        .filter(|r| {
            let name = r["suite"].as_str().unwrap_or("");
            pins.iter().any(|p| {
                if p.suite.ends_with('[') {
                    name.starts_with(p.suite)
                } else {
                    name == p.suite
                }
            })
        })
        .filter_map(|r| r["max_defect"].as_f64())
        .fold(0.0, f64::max)
}

fn main() {
    let first = verify_seed0();
    let second = verify_seed0();
    let text = String::from_utf8(first.clone()).expect("utf-8 output");
    let reports: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).expect("JSON line"))
        .collect();
    assert!(reports.iter().all(|r| r["schema"] == 1));

    let mut failed = Vec::new();
    for (n, name, pins) in criteria() {
        let problems: Vec<String> = pins.iter().filter_map(|p| check(&reports, p)).collect();
        if problems.is_empty() {
            println!(
                "criterion {n:>2} {name}: PASS (max defect {:.3e})",
                max_defect(&reports, &pins)
            );
        } else {
            println!("criterion {n:>2} {name}: FAIL ({})", problems.join("; "));
            failed.push(n);
        }
    }
    if first == second {
        println!(
            "criterion 11 determinism: PASS ({} report lines, byte-identical)",
            reports.len()
        );
    } else {
        println!("criterion 11 determinism: FAIL (two runs of verify --seed 0 differ)");
        failed.push(11);
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
