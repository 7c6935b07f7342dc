//! One line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use aflab::suites::run_suite;

const CRITERIA: [(u8, &str, &str); 8] = [
    (1, "dichotomy", "balance agrees with simulated termination on every atlas and random configuration"),
    (2, "quiescence", "balanced configurations empty within 2|E| steps; single sources finish within 2D+1 sending rounds"),
    (3, "reverse", "the replay identity holds and balanced configurations are rebuilt from the empty one"),
    (4, "drops", "drop predictions match simulation; some drop always breaks flooding, every drop on bipartite graphs"),
    (5, "unidirectional", "breaking edges are bad, every failure set has a bad source, loops carry mixed cycles"),
    (6, "byzantine", "constructed capabilities match exhaustive adversaries and validate by simulation"),
    (7, "variants", "parrot, one-bit, two-hop and random flooding behave as characterised"),
    (8, "uniqueness", "surviving stateless protocols satisfy the necessary conditions and agree with flooding"),
];

fn main() -> ExitCode {
    // `cargo test -- <filter>` narrows to matching suite names
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (n, suite, claim) in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| suite.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let t0 = Instant::now();
        let report = run_suite(suite).expect("known suite");
        let verdict = if report.passed { "PASS" } else { "FAIL" };
        println!("criterion {n} [{suite}] {verdict} ({:.1}s): {claim}", t0.elapsed().as_secs_f64());
        for c in &report.checks {
            println!("    {}: {}/{} ok", c.name, c.cases - c.failures, c.cases);
            for (k, v) in &c.facts {
                println!("        {k} = {v}");
            }
            for ce in &c.counterexamples {
                println!("        counterexample: {ce}");
            }
        }
        failed += !report.passed as u32;
    }
    println!("acceptance: {}/{ran} criteria pass", ran - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
