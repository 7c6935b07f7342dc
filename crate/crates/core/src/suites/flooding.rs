//! Termination dichotomy, quiescence bounds and reverse-time replay.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{combine, dichotomy_graphs, edges_of, random_masks, small_masks, SuiteReport, Tally, RANDOM_CONFIGURATIONS, SMALL_CONFIGURATION};
use crate::balance::BalanceChecker;
use crate::engine::{self, ArcTable, Configuration, Mask};
use crate::graph::Graph;

/// Configurations of a graph: every small one, then the seeded random ones.
fn configurations(t: &ArcTable, seed: u64) -> (Vec<Mask>, Vec<Mask>) {
    (small_masks(t.arc_count(), SMALL_CONFIGURATION), random_masks(t.full(), RANDOM_CONFIGURATIONS, seed))
}

/// Steps until `∅`, or `None` once the orbit is seen to cycle. Uncapped:
/// Brent's cycle detection on the deterministic step map.
fn exact_quiescence(t: &ArcTable, s: Mask) -> Option<usize> {
    let (mut x, mut mark) = (s, s);
    let (mut steps, mut lam, mut power) = (0usize, 0usize, 1usize);
    loop {
        if x == 0 {
            return Some(steps);
        }
        x = t.step(x, 0);
        steps += 1;
        lam += 1;
        if x == mark {
            return None;
        }
        if lam == power {
            mark = x;
            power *= 2;
            lam = 0;
        }
    }
}

/// Balance against the capped termination oracle on every configuration,
/// and the bitmask checker against the literal cycle/FEC definition on the
/// random ones and those with at most one message.
pub fn dichotomy() -> SuiteReport {
    let graphs = dichotomy_graphs(7);
    let parts: Vec<[Tally; 2]> = graphs
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut agree = Tally::default();
            let mut literal = Tally::default();
            let bc = BalanceChecker::new(g).expect("desk-scale graph");
            let t = &bc.table;
            let cap = 2 * g.m();
            let (small, random) = configurations(t, gi as u64);
            for (idx, &s) in small.iter().chain(&random).enumerate() {
                let balanced = bc.balanced_mask(s);
                let terminates = t.empties_within(s, cap).is_some();
                agree.record(balanced == terminates, || format!("{} S={:?} balanced={balanced}", edges_of(g), t.config_of(s)));
                if idx >= small.len() || s.count_ones() <= 1 {
                    let definition = bc.structures().check(&t.config_of(s)).balanced;
                    literal.record(definition == balanced, || format!("{} S={:?} checker={balanced}", edges_of(g), t.config_of(s)));
                }
            }
            [agree, literal]
        })
        .collect();
    let [agree, literal] = combine(parts);
    let mut a = agree.check("balanced iff flooding empties within 2|E|");
    a.facts.insert("graphs".into(), graphs.len().to_string());
    SuiteReport::new("dichotomy", vec![a, literal.check("bitmask checker equals the cycle/FEC definition")])
}

/// Exact (uncapped) quiescence times on the dichotomy configurations, and
/// single-source runs from every vertex.
pub fn quiescence() -> SuiteReport {
    let graphs = dichotomy_graphs(7);
    let parts: Vec<[Tally; 3]> = graphs
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let mut bounded = Tally::default();
            let mut exact = Tally::default();
            let mut single = Tally::default();
            let bc = BalanceChecker::new(g).expect("desk-scale graph");
            let t = &bc.table;
            let cap = 2 * g.m();
            let (small, random) = configurations(t, gi as u64);
            for &s in small.iter().chain(&random) {
                let q = exact_quiescence(t, s);
                let balanced = bc.balanced_mask(s);
                if balanced {
                    bounded.record(q.is_some_and(|k| k <= cap), || format!("{} S={:?} empties after {q:?}", edges_of(g), t.config_of(s)));
                }
                exact.record(q.is_some() == balanced && q.map_or(true, |k| k <= cap), || {
                    format!("{} S={:?} balanced={balanced} quiescence={q:?}", edges_of(g), t.config_of(s))
                });
            }
            let diam = g.diameter();
            for &v in g.vertices() {
                let trace = engine::run(g, &engine::single(v), engine::default_cap(g, &engine::single(v))).expect("valid run");
                let dist = g.distances(v);
                let on_time = trace.broadcast && g.vertices().iter().all(|w| trace.informed.get(w).is_some_and(|&r| r <= dist[w] + 1));
                let ok = trace.terminated() && trace.sending_rounds() <= 2 * diam + 1 && on_time;
                single.record(ok, || format!("{} source {v}: {} sending rounds, informed {:?}", edges_of(g), trace.sending_rounds(), trace.informed));
            }
            [bounded, exact, single]
        })
        .collect();
    let [bounded, exact, single] = combine(parts);
    SuiteReport::new(
        "quiescence",
        vec![
            bounded.check("balanced configurations empty within 2|E| steps"),
            exact.check("exact fate matches balance, never emptying late"),
            single.check("single source: 2diam+1 sending rounds, informed by dist+1"),
        ],
    )
}

/// Pairs for the replay identity.
pub const REPLAY_PAIRS: usize = 1000;

/// The one-step replay identity on seeded random pairs, and rebuilding
/// every balanced dichotomy configuration on at most six vertices.
pub fn reverse_time() -> SuiteReport {
    let pool = super::atlas(7);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut identity = Tally::default();
    for _ in 0..REPLAY_PAIRS {
        let g = &pool[rng.gen_range(0..pool.len())];
        let t = ArcTable::new(g).expect("small graph");
        let s = t.config_of(rng.gen::<Mask>() & t.full());
        let (prev, sinks) = engine::step_back(g, &s).expect("valid configuration");
        let replay = engine::af_step(g, &prev, &sinks).expect("valid configuration");
        identity.record(replay == s, || format!("{} S={s:?} replay={replay:?}", edges_of(g)));
    }
    let graphs: Vec<(usize, Graph)> = super::dichotomy_graphs(7).into_iter().enumerate().filter(|(_, g)| g.n() <= 6).collect();
    let parts: Vec<[Tally; 1]> = graphs
        .par_iter()
        .map(|(gi, g)| {
            let mut rebuilt = Tally::default();
            let bc = BalanceChecker::new(g).expect("desk-scale graph");
            let t = &bc.table;
            let (small, random) = configurations(t, *gi as u64);
            for &m in small.iter().chain(&random) {
                if !bc.balanced_mask(m) {
                    continue;
                }
                let s = t.config_of(m);
                rebuilt.record(rebuilds(g, &s), || format!("{} S={s:?}", edges_of(g)));
            }
            [rebuilt]
        })
        .collect();
    let [rebuilt] = combine(parts);
    SuiteReport::new(
        "reverse",
        vec![identity.check("step back then forward returns the configuration"), rebuilt.check("balanced configurations rebuilt from the empty one")],
    )
}

fn rebuilds(g: &Graph, s: &Configuration) -> bool {
    let Ok(Some(k)) = engine::history_length(g, s, 2 * g.m() + 1) else { return false };
    let k = k.max(1);
    let Ok(schedule) = engine::reconstruct_history(g, s, k) else { return false };
    let mut cur = Configuration::new();
    for i in &schedule {
        cur = engine::af_step(g, &cur, i).expect("valid schedule");
    }
    cur == *s
}
