//! Drop, link-failure and Byzantine suites.

use rayon::prelude::*;

use super::{atlas, combine, edges_of, SuiteReport, Tally};
use crate::engine::VertexSet;
use crate::faults::byzantine::{capability_with, exhaustive_with};
use crate::faults::drop::classify_with;
use crate::faults::unidir::{bad_source_with, breaking_edge_with};
use crate::faults::{observe_drop, single_schedule, Certificate, FaultLab, FaultSpec, Occurrence, Termination};
use crate::graph::{Graph, Msg, Vertex};

/// Every (graph on at most six vertices, source, directed edge, first or
/// second use): the predicted case split against the simulated verdict.
pub fn drops() -> SuiteReport {
    let graphs = atlas(6);
    let parts: Vec<[Tally; 3]> = graphs
        .par_iter()
        .map(|g| {
            let mut agree = Tally::default();
            let mut some_bad = Tally::default();
            let mut bipartite = Tally::default();
            let lab = FaultLab::new(g).expect("small graph");
            for &src in g.vertices() {
                let mut any = false;
                for m in g.all_messages() {
                    for occ in [Occurrence::First, Occurrence::Second] {
                        if classify_with(&lab, src, m, occ).is_err() {
                            continue;
                        }
                        let (p, v) = observe_drop(&lab, src, m, occ).expect("message is sent");
                        let certified = matches!(v.termination, Termination::NonTerminating { certificate: Certificate::Imbalance { .. } });
                        let looping = matches!(v.termination, Termination::NonTerminating { .. });
                        let ok = p.non_termination == looping && (!looping || certified) && p.non_broadcast == !v.broadcast_ok && !v.inconclusive();
                        agree.record(ok, || format!("{} source {src} drop {m:?} {occ:?}: predicted {p:?}, observed {v:?}", edges_of(g)));
                        any |= v.is_bad();
                        if g.is_bipartite() {
                            bipartite.record(v.is_bad(), || format!("{} source {src} drop {m:?} {occ:?} harmless", edges_of(g)));
                        }
                    }
                }
                some_bad.record(any, || format!("{} source {src}: no harmful drop", edges_of(g)));
            }
            [agree, some_bad, bipartite]
        })
        .collect();
    let [agree, some_bad, bipartite] = combine(parts);
    SuiteReport::new(
        "drops",
        vec![
            agree.check("predicted case split equals simulation"),
            some_bad.check("every graph and source has a harmful drop"),
            bipartite.check("every drop on a bipartite graph is harmful"),
        ],
    )
}

/// Failure sets tried exhaustively on graphs with at most this many edges;
/// larger graphs get every set of at most two oriented links.
pub const ALL_FAILURE_SETS_EDGES: usize = 6;

/// Sets of oriented links that never fail both ways on one edge.
fn failure_sets(g: &Graph) -> Vec<Vec<Msg>> {
    let edges = g.edges();
    let mut out = Vec::new();
    if edges.len() <= ALL_FAILURE_SETS_EDGES {
        let total = 3usize.pow(edges.len() as u32);
        for code in 1..total {
            let mut c = code;
            let mut set = Vec::new();
            for &(u, v) in &edges {
                match c % 3 {
                    1 => set.push((u, v)),
                    2 => set.push((v, u)),
                    _ => {}
                }
                c /= 3;
            }
            out.push(set);
        }
    } else {
        let arcs = g.all_messages();
        for (i, &a) in arcs.iter().enumerate() {
            out.push(vec![a]);
            for &b in &arcs[i + 1..] {
                if b != (a.1, a.0) {
                    out.push(vec![a, b]);
                }
            }
        }
    }
    out
}

pub fn unidirectional() -> SuiteReport {
    let graphs = atlas(6);
    let parts: Vec<[Tally; 3]> = graphs
        .par_iter()
        .map(|g| {
            let mut breaking = Tally::default();
            let mut sourced = Tally::default();
            let mut certified = Tally::default();
            let lab = FaultLab::new(g).expect("small graph");
            for &v in g.vertices() {
                let found = breaking_edge_with(&lab, &VertexSet::from([v]));
                breaking.record(found.as_ref().is_ok_and(|b| b.verdict.is_bad() && !b.verdict.inconclusive()), || {
                    format!("{} source {v}: {found:?}", edges_of(g))
                });
            }
            let cap = 4 * g.m() + 2;
            for x in failure_sets(g) {
                let found = bad_source_with(&lab, &x).expect("valid failure set");
                sourced.record(found.is_some(), || format!("{} failed {x:?}: every source fine", edges_of(g)));
                let fault = FaultSpec::Unidirectional { arcs: x.clone() };
                for &v in g.vertices() {
                    let (_, verdict) = lab.run(&single_schedule(v), &fault, cap).expect("valid fault");
                    if let Termination::NonTerminating { certificate } = &verdict.termination {
                        certified.record(matches!(certificate, Certificate::MixedCycle { .. }), || {
                            format!("{} failed {x:?} source {v}: {certificate:?}", edges_of(g))
                        });
                    }
                }
            }
            [breaking, sourced, certified]
        })
        .collect();
    let [breaking, sourced, certified] = combine(parts);
    SuiteReport::new(
        "unidirectional",
        vec![
            breaking.check("constructed breaking edge verified bad"),
            sourced.check("every failure set has a bad source"),
            certified.check("mixed-cycle certificate on every non-terminating run"),
        ],
    )
}

/// Byzantine sets of at most two vertices, disjoint from the source.
fn byzantine_sets(g: &Graph, src: Vertex) -> Vec<VertexSet> {
    let others: Vec<Vertex> = g.vertices().iter().copied().filter(|&v| v != src).collect();
    let mut out = vec![VertexSet::new()];
    for (i, &a) in others.iter().enumerate() {
        out.push(VertexSet::from([a]));
        for &b in &others[i + 1..] {
            out.push(VertexSet::from([a, b]));
        }
    }
    out
}

/// Vertex counts of the exhaustive comparison and of the constructive check.
pub const BYZANTINE_EXHAUSTIVE_N: usize = 5;
pub const BYZANTINE_CONSTRUCTIVE_N: usize = 7;

pub fn byzantine() -> SuiteReport {
    let small = atlas(BYZANTINE_EXHAUSTIVE_N);
    let parts: Vec<[Tally; 1]> = small
        .par_iter()
        .map(|g| {
            let mut agree = Tally::default();
            let lab = FaultLab::new(g).expect("small graph");
            let d = g.diameter();
            for &src in g.vertices() {
                let i = VertexSet::from([src]);
                for j in byzantine_sets(g, src) {
                    let cap = capability_with(&lab, &i, &j, None).expect("valid sets");
                    for h in (2 * d).max(2)..=2 * d + 2 {
                        let e = exhaustive_with(&lab, &i, &j, h).expect("valid sets");
                        let ok = e.can_block_broadcast == cap.can_block_broadcast && e.can_block_termination == cap.can_block_termination;
                        agree.record(ok, || {
                            format!(
                                "{} source {src} J={j:?} horizon {h}: search ({}, {}) predicted ({}, {})",
                                edges_of(g),
                                e.can_block_broadcast,
                                e.can_block_termination,
                                cap.can_block_broadcast,
                                cap.can_block_termination
                            )
                        });
                    }
                }
            }
            [agree]
        })
        .collect();
    let [agree] = combine(parts);
    let large = atlas(BYZANTINE_CONSTRUCTIVE_N);
    let parts: Vec<[Tally; 2]> = large
        .par_iter()
        .map(|g| {
            let mut valid = Tally::default();
            let mut non_leaf = Tally::default();
            let lab = FaultLab::new(g).expect("small graph");
            for &src in g.vertices() {
                let i = VertexSet::from([src]);
                for j in byzantine_sets(g, src) {
                    let cap = capability_with(&lab, &i, &j, None).expect("valid sets");
                    valid.record(cap.validated, || format!("{} source {src} J={j:?}: {cap:?}", edges_of(g)));
                    if j.len() == 1 && j.iter().all(|&b| g.degree(b) >= 2) {
                        non_leaf.record(cap.can_block_broadcast || cap.can_block_termination, || format!("{} source {src} J={j:?} powerless", edges_of(g)));
                    }
                }
            }
            [valid, non_leaf]
        })
        .collect();
    let [valid, non_leaf] = combine(parts);
    SuiteReport::new(
        "byzantine",
        vec![
            agree.check("predicted capability equals exhaustive search"),
            valid.check("constructed strategies achieve their goal"),
            non_leaf.check("a single non-leaf vertex can do harm"),
        ],
    )
}
