//! Parrot, 1-Bit, Neighbourhood-2 and Random Flooding suites.

use rayon::prelude::*;

use super::{atlas, combine, edges_of, small_masks, Check, SuiteReport, Tally};
use crate::engine;
use crate::graph::{Graph, Vertex};
use crate::variants::{is_p_balanced_bounded, parrot_cap, random_cap, run_variant, PBalanceChecker, Protocol, RandomMode, RandomSource, Runner, VariantTable};

/// Messages per configuration in the Parrot dichotomy.
pub const PARROT_MESSAGES: usize = 3;
/// Vertex bound for the literal leaf-path cross-check.
pub const LEAF_PATH_LITERAL_N: usize = 5;
pub const RANDOM_SEEDS: u64 = 1000;
/// Least fraction of seeds that must terminate within the cap.
pub const RANDOM_TERMINATION_RATE: f64 = 0.99;
/// Vertex bound for the Random Flooding graphs.
pub const RANDOM_GRAPHS_N: usize = 5;

fn parrot_quiesces(vt: &VariantTable, mut s: engine::Mask, cap: usize) -> bool {
    for _ in 0..=cap {
        if s == 0 {
            return true;
        }
        s = vt.parrot(s);
    }
    false
}

/// A vertex adjacent to every other, all of them leaves.
fn star_centre(g: &Graph) -> Option<Vertex> {
    if g.n() < 3 {
        return None;
    }
    g.vertices().iter().copied().find(|&c| g.degree(c) == g.n() - 1 && g.vertices().iter().all(|&v| v == c || g.degree(v) == 1))
}

pub fn variants() -> SuiteReport {
    let leafed: Vec<Graph> = atlas(6).into_iter().filter(|g| !g.leaves().is_empty()).collect();
    let parts: Vec<[Tally; 3]> = leafed
        .par_iter()
        .map(|g| {
            let mut dichotomy = Tally::default();
            let mut literal = Tally::default();
            let mut conserved = Tally::default();
            let pb = PBalanceChecker::new(g).expect("small graph");
            let vt = VariantTable::new(g).expect("small graph");
            let t = &vt.table;
            let cap = parrot_cap(g);
            for s in small_masks(t.arc_count(), PARROT_MESSAGES) {
                let p = pb.p_balanced_mask(s);
                dichotomy.record(p == parrot_quiesces(&vt, s, cap), || format!("{} S={:?} p_balanced={p}", edges_of(g), t.config_of(s)));
                if g.n() <= LEAF_PATH_LITERAL_N && s.count_ones() <= 2 {
                    let by_paths = is_p_balanced_bounded(g, &t.config_of(s), 2 * g.m()).expect("small graph");
                    literal.record(by_paths == p, || format!("{} S={:?} checker={p}", edges_of(g), t.config_of(s)));
                }
                conserved.record(pb.p_balanced_mask(vt.parrot(s)) == p, || format!("{} S={:?}", edges_of(g), t.config_of(s)));
            }
            [dichotomy, literal, conserved]
        })
        .collect();
    let [dichotomy, literal, conserved] = combine(parts);

    let graphs = atlas(7);
    let parts: Vec<[Tally; 4]> = graphs
        .par_iter()
        .map(|g| {
            let mut parrot = Tally::default();
            let mut one_bit = Tally::default();
            let mut n2 = Tally::default();
            let mut n2_shape = Tally::default();
            let cap = parrot_cap(g);
            let centre = star_centre(g);
            for &v in g.vertices() {
                let good = |p: Protocol| {
                    let s = Runner::new(p, g, v, None).expect("deterministic protocol").summary(cap);
                    (s.terminated_at.is_some() && s.broadcast_round.is_some(), s)
                };
                if g.degree(v) >= 2 {
                    let (ok, s) = good(Protocol::Parrot);
                    parrot.record(ok, || format!("{} source {v}: {s:?}", edges_of(g)));
                }
                let (ok, s) = good(Protocol::OneBit);
                one_bit.record(ok, || format!("{} source {v}: {s:?}", edges_of(g)));
                let (ok, s) = good(Protocol::Neighbourhood2);
                n2.record(ok, || format!("{} source {v}: {s:?}", edges_of(g)));
                let trace = run_variant(Protocol::Neighbourhood2, g, v, None, cap).expect("deterministic protocol");
                match centre {
                    None => {
                        let af = engine::run(g, &engine::single(v), cap).expect("valid run");
                        n2_shape.record(af.rounds == trace.rounds, || format!("{} source {v}: differs from flooding", edges_of(g)));
                    }
                    Some(c) => {
                        let wave = trace.rounds.iter().position(|s| s.iter().any(|&(u, _)| u == c));
                        let quiet = wave.is_some_and(|w| trace.rounds[w..].iter().flatten().all(|&(u, _)| u == c));
                        n2_shape.record(quiet, || format!("{} source {v}: leaves speak after the centre", edges_of(g)));
                    }
                }
            }
            [parrot, one_bit, n2, n2_shape]
        })
        .collect();
    let [parrot, one_bit, n2, n2_shape] = combine(parts);

    let small = atlas(RANDOM_GRAPHS_N);
    let parts: Vec<([Tally; 2], u64)> = small
        .par_iter()
        .map(|g| {
            let mut broadcast = Tally::default();
            let mut rate = Tally::default();
            let src = g.vertices()[0];
            let by = g.diameter() + 1;
            let mut shared_done = 0;
            for mode in [RandomMode::PerNode, RandomMode::Shared] {
                let cap = random_cap(g, mode);
                let mut done = 0;
                for seed in 0..RANDOM_SEEDS {
                    let mut rng = RandomSource::new(seed, mode);
                    let s = Runner::new(Protocol::Random, g, src, Some(&mut rng)).expect("random source given").summary(cap);
                    broadcast.record(s.broadcast_round.is_some_and(|r| r <= by), || format!("{} seed {seed} {mode:?}: {s:?}", edges_of(g)));
                    done += s.terminated_at.is_some() as u64;
                }
                match mode {
                    RandomMode::PerNode => {
                        rate.record(done as f64 >= RANDOM_TERMINATION_RATE * RANDOM_SEEDS as f64, || format!("{}: {done}/{RANDOM_SEEDS} terminate", edges_of(g)))
                    }
                    RandomMode::Shared => shared_done = done,
                }
            }
            ([broadcast, rate], shared_done)
        })
        .collect();
    let shared: u64 = parts.iter().map(|p| p.1).sum();
    let [broadcast, rate] = combine(parts.into_iter().map(|p| p.0).collect());
    let mut rate: Check = rate.check("random (per-node bits) terminates within the cap for 99% of seeds");
    rate.facts.insert("shared_bit_terminated".into(), format!("{shared}/{}", RANDOM_SEEDS * small.len() as u64));

    SuiteReport::new(
        "variants",
        vec![
            dichotomy.check("P-balanced iff parrot quiesces, at most three messages"),
            literal.check("P-balance checker equals the leaf-path definition"),
            conserved.check("P-balance preserved by a parrot step"),
            parrot.check("parrot from non-leaf sources correct and terminating"),
            one_bit.check("1-bit correct and terminating"),
            n2.check("neighbourhood-2 correct and terminating"),
            n2_shape.check("neighbourhood-2 is flooding off stars, centre-only on stars"),
            broadcast.check("random broadcasts by diam+1"),
            rate,
        ],
    )
}
