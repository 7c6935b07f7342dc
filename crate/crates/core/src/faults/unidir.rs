//! Uni-directional link failures.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{single_schedule, FaultError, FaultLab, FaultSpec, FaultVerdict};
use crate::engine::{Configuration, Schedule, VertexSet};
use crate::graph::{enumerate_cycles, Cycle, Graph, Msg, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedCertificate {
    pub cycle: Cycle,
    /// True when the surviving arcs point along the cycle's stored direction.
    pub along_stored: bool,
    pub with_arcs: usize,
    pub against_arcs: usize,
}

/// A cycle whose oriented links all point the same way around it and which
/// carries more messages in that direction than against it.
///
/// `failed` lists the directions that no longer work, so the surviving arc
/// of a failed link `(u, v)` is `v -> u`. Links failed in both directions
/// are gone and no cycle may use them.
pub fn mixed_cycle_certificate(g: &Graph, failed: &[Msg], s: &Configuration) -> Option<MixedCertificate> {
    if failed.is_empty() || s.is_empty() {
        return None;
    }
    let dead: BTreeSet<Msg> = failed.iter().copied().collect();
    for c in enumerate_cycles(g, g.n()) {
        let mut along = 0;
        let mut against = 0;
        let mut gone = false;
        for (a, b) in c.clockwise() {
            match (dead.contains(&(a, b)), dead.contains(&(b, a))) {
                (true, true) => gone = true,
                (false, true) => along += 1,
                (true, false) => against += 1,
                (false, false) => {}
            }
        }
        if gone || (along > 0) == (against > 0) {
            continue;
        }
        let along_stored = along > 0;
        let mut cw = 0;
        let mut ccw = 0;
        for (a, b) in c.clockwise() {
            cw += s.contains(&(a, b)) as usize;
            ccw += s.contains(&(b, a)) as usize;
        }
        let (with_arcs, against_arcs) = if along_stored { (cw, ccw) } else { (ccw, cw) };
        if with_arcs > against_arcs {
            return Some(MixedCertificate { cycle: c, along_stored, with_arcs, against_arcs });
        }
    }
    None
}

pub fn mixed_cycle_check(g: &Graph, failed: &[Msg], s: &Configuration) -> bool {
    mixed_cycle_certificate(g, failed, s).is_some()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// A bridge whose far side holds no initiator, failed away from them.
    Bridge,
    /// A cycle edge at the cycle vertex nearest the initiators, failed outwards.
    Cycle,
    /// Neither construction verified; found by trying every oriented link.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakingEdge {
    /// The direction that fails.
    pub failed: Msg,
    pub recipe: Recipe,
    pub verdict: FaultVerdict,
}

fn verify(lab: &FaultLab, schedule: &Schedule, failed: Msg) -> Result<FaultVerdict, FaultError> {
    let fault = FaultSpec::Unidirectional { arcs: vec![failed] };
    let cap = 4 * lab.graph.m() + schedule.len() + 1;
    Ok(lab.run(schedule, &fault, cap)?.1)
}

/// An oriented link whose failure breaks broadcast or termination from `i`.
pub fn find_breaking_edge(g: &Graph, i: &VertexSet) -> Result<BreakingEdge, FaultError> {
    let lab = FaultLab::new(g)?;
    breaking_edge_with(&lab, i)
}

pub(crate) fn breaking_edge_with(lab: &FaultLab, i: &VertexSet) -> Result<BreakingEdge, FaultError> {
    let g = &lab.graph;
    if i.is_empty() {
        return Err(FaultError::EmptySchedule);
    }
    if i.len() >= g.n() {
        return Err(FaultError::AllInitiators);
    }
    let schedule: Schedule = vec![i.clone()];
    let mut candidates: Vec<(Msg, Recipe)> = Vec::new();
    for (u, v) in g.edges() {
        if !g.is_bridge(u, v)? {
            continue;
        }
        // orient towards the side holding every initiator
        let near_u = side(g, (u, v), u);
        if i.iter().all(|x| near_u.contains(x)) {
            candidates.push(((u, v), Recipe::Bridge));
        } else if i.iter().all(|x| !near_u.contains(x)) {
            candidates.push(((v, u), Recipe::Bridge));
        }
    }
    let dist = multi_source_distances(g, i);
    let cycles = enumerate_cycles(g, g.n());
    let mut best: Option<(usize, Vertex, Vertex)> = None;
    for c in &cycles {
        let k = c.len();
        for p in 0..k {
            let v = c.vertices[p];
            let d = dist[&v];
            for w in [c.vertices[(p + 1) % k], c.vertices[(p + k - 1) % k]] {
                if best.map_or(true, |b| (d, v, w) < b) {
                    best = Some((d, v, w));
                }
            }
        }
    }
    if let Some((_, v, w)) = best {
        candidates.push(((v, w), Recipe::Cycle));
    }
    for (failed, recipe) in candidates {
        let verdict = verify(lab, &schedule, failed)?;
        if verdict.is_bad() {
            return Ok(BreakingEdge { failed, recipe, verdict });
        }
    }
    for m in g.all_messages() {
        let verdict = verify(lab, &schedule, m)?;
        if verdict.is_bad() {
            return Ok(BreakingEdge { failed: m, recipe: Recipe::Exhaustive, verdict });
        }
    }
    Err(FaultError::NoBreakingEdge)
}

/// Vertices on `endpoint`'s side of the edge.
fn side(g: &Graph, (u, v): Msg, endpoint: Vertex) -> BTreeSet<Vertex> {
    let mut seen = BTreeSet::from([endpoint]);
    let mut stack = vec![endpoint];
    while let Some(x) = stack.pop() {
        for y in g.neighbours(x) {
            if (x, y) == (u, v) || (x, y) == (v, u) {
                continue;
            }
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

fn multi_source_distances(g: &Graph, i: &VertexSet) -> std::collections::BTreeMap<Vertex, usize> {
    let mut best = std::collections::BTreeMap::new();
    for &s in i {
        for (v, d) in g.distances(s) {
            let e = best.entry(v).or_insert(d);
            *e = (*e).min(d);
        }
    }
    best
}

/// A source from which flooding breaks under the failure set: one that
/// cannot reach some vertex, or else the tail of a failed link lying on a
/// consistently oriented cycle. Falls back to trying every vertex.
pub fn bad_source(g: &Graph, failed: &[Msg]) -> Result<Option<(Vertex, FaultVerdict)>, FaultError> {
    let lab = FaultLab::new(g)?;
    bad_source_with(&lab, failed)
}

pub(crate) fn bad_source_with(lab: &FaultLab, failed: &[Msg]) -> Result<Option<(Vertex, FaultVerdict)>, FaultError> {
    let g = &lab.graph;
    let dead: BTreeSet<Msg> = failed.iter().copied().collect();
    let mut order: Vec<Vertex> = Vec::new();
    for &u in g.vertices() {
        if reach(g, &dead, u).len() < g.n() {
            order.push(u);
            break;
        }
    }
    for &(u, _) in failed {
        order.push(u);
    }
    order.extend(g.vertices().iter().copied());
    let fault = FaultSpec::Unidirectional { arcs: failed.to_vec() };
    for v in order {
        let (_, verdict) = lab.run(&single_schedule(v), &fault, 4 * g.m() + 2)?;
        if verdict.is_bad() {
            return Ok(Some((v, verdict)));
        }
    }
    Ok(None)
}

fn reach(g: &Graph, dead: &BTreeSet<Msg>, src: Vertex) -> BTreeSet<Vertex> {
    let mut seen = BTreeSet::from([src]);
    let mut stack = vec![src];
    while let Some(x) = stack.pop() {
        for y in g.neighbours(x) {
            if !dead.contains(&(x, y)) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}
