//! Batch verification suites. Each returns a report of named checks with
//! case counts, failure counts and the first few counterexamples; reports
//! are assembled in a fixed order so reruns compare byte for byte.

mod faulty;
mod flooding;
mod search;
mod variants;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::Mask;
use crate::graph::{connected_graphs, random_connected_sample, Graph};

pub use faulty::{byzantine, drops, unidirectional};
pub use flooding::{dichotomy, quiescence, reverse_time};
pub use search::uniqueness;
pub use variants::variants;

/// Counterexamples kept per check.
pub const MAX_COUNTEREXAMPLES: usize = 5;

/// Suites accepted by [`run_suite`], in acceptance order.
pub const SUITE_NAMES: [&str; 8] = ["dichotomy", "quiescence", "reverse", "drops", "unidirectional", "byzantine", "variants", "uniqueness"];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    pub counterexamples: Vec<String>,
    /// Measurements reported alongside the pass/fail count.
    pub facts: BTreeMap<String, String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<Check>) -> SuiteReport {
        SuiteReport { suite: suite.into(), passed: checks.iter().all(Check::passed), checks }
    }

    /// One line: suite, verdict and per-check counts.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .checks
            .iter()
            .map(|c| format!("{}: {}/{} ok", c.name, c.cases - c.failures, c.cases))
            .collect();
        format!("{} {} [{}]", self.suite, if self.passed { "PASS" } else { "FAIL" }, parts.join("; "))
    }
}

pub fn run_suite(name: &str) -> Option<SuiteReport> {
    Some(match name {
        "dichotomy" => dichotomy(),
        "quiescence" => quiescence(),
        "reverse" => reverse_time(),
        "drops" => drops(),
        "unidirectional" => unidirectional(),
        "byzantine" => byzantine(),
        "variants" => variants(),
        "uniqueness" => uniqueness(),
        _ => return None,
    })
}

/// Case and failure counts with the first counterexamples.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    cases: u64,
    failures: u64,
    examples: Vec<String>,
}

impl Tally {
    pub(crate) fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_COUNTEREXAMPLES {
                self.examples.push(describe());
            }
        }
    }

    pub(crate) fn absorb(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < MAX_COUNTEREXAMPLES {
                self.examples.push(e);
            }
        }
    }

    pub(crate) fn check(self, name: &str) -> Check {
        Check { name: name.into(), cases: self.cases, failures: self.failures, counterexamples: self.examples, facts: BTreeMap::new() }
    }
}

/// Adds up same-position tallies from independent workers, in input order.
pub(crate) fn combine<const K: usize>(parts: Vec<[Tally; K]>) -> [Tally; K] {
    let mut acc: [Tally; K] = std::array::from_fn(|_| Tally::default());
    for part in parts {
        for (a, t) in acc.iter_mut().zip(part) {
            a.absorb(t);
        }
    }
    acc
}

/// One representative per isomorphism class on `2..=max_n` vertices.
pub fn atlas(max_n: usize) -> Vec<Graph> {
    (2..=max_n).flat_map(connected_graphs).collect()
}

/// Seeded random connected graphs per size.
pub const RANDOM_GRAPHS_PER_SIZE: usize = 50;
/// Seeded random configurations per graph.
pub const RANDOM_CONFIGURATIONS: usize = 200;
/// Every configuration with at most this many messages is checked.
pub const SMALL_CONFIGURATION: usize = 4;

/// The atlas on `2..=max_n` vertices plus seeded random connected graphs
/// of every size.
pub fn dichotomy_graphs(max_n: usize) -> Vec<Graph> {
    let mut out = atlas(max_n);
    for n in 2..=max_n {
        out.extend(random_connected_sample(n, RANDOM_GRAPHS_PER_SIZE, n as u64));
    }
    out
}

/// Every arc set with at most `k` of the `arcs` arcs.
pub(crate) fn small_masks(arcs: usize, k: usize) -> Vec<Mask> {
    fn go(arcs: usize, k: usize, from: usize, cur: Mask, out: &mut Vec<Mask>) {
        out.push(cur);
        if k == 0 {
            return;
        }
        for a in from..arcs {
            go(arcs, k - 1, a + 1, cur | 1 << a, out);
        }
    }
    let mut out = Vec::new();
    go(arcs, k, 0, 0, &mut out);
    out
}

/// Uniformly random arc sets, seeded per graph.
pub(crate) fn random_masks(full: Mask, count: usize, seed: u64) -> Vec<Mask> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen::<Mask>() & full).collect()
}

pub(crate) fn edges_of(g: &Graph) -> String {
    format!("{:?}", g.edges())
}
