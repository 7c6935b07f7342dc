//! The flooding operator, traces, and reverse-time reconstruction.
//!
//! Round indexing: `S_1 = A_{I_1}(∅)` is the set of messages sent in round 1,
//! and `S_{i+1} = A_{I_{i+1}}(S_i)`.

mod arcs;
pub mod export;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use arcs::{bits, vbits, ArcTable, Mask, VMask};

use crate::graph::{Graph, Msg, Vertex};

pub type Configuration = BTreeSet<Msg>;
pub type VertexSet = BTreeSet<Vertex>;
/// Initiator sets `I_1, I_2, ...`; rounds past the end have no initiators.
pub type Schedule = Vec<VertexSet>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("message ({0},{1}) does not lie on an edge")]
    NoEdge(Vertex, Vertex),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("round cap must be at least 1")]
    BadCap,
    #[error("stepping back {k} times leaves {} messages", residual.len())]
    ReconstructionIncomplete { k: usize, residual: Configuration },
}

pub fn validate(g: &Graph, s: &Configuration) -> Result<(), EngineError> {
    for &(u, v) in s {
        if !g.has_edge(u, v) {
            return Err(EngineError::NoEdge(u, v));
        }
    }
    Ok(())
}

fn validate_vertices<'a>(g: &Graph, vs: impl IntoIterator<Item = &'a Vertex>) -> Result<(), EngineError> {
    for &v in vs {
        if !g.contains(v) {
            return Err(EngineError::UnknownVertex(v));
        }
    }
    Ok(())
}

/// `{(u,v) : uv ∈ E, (v,u) ∉ s, and ((w,u) ∈ s for some w, or u ∈ i)}`.
pub fn af_step(g: &Graph, s: &Configuration, i: &VertexSet) -> Result<Configuration, EngineError> {
    validate(g, s)?;
    validate_vertices(g, i)?;
    let receivers: VertexSet = s.iter().map(|&(_, v)| v).collect();
    let mut out = Configuration::new();
    for (a, b) in g.edges() {
        for (u, v) in [(a, b), (b, a)] {
            let active = receivers.contains(&u) || i.contains(&u);
            if active && !s.contains(&(v, u)) {
                out.insert((u, v));
            }
        }
    }
    Ok(out)
}

/// `S̄`: every message flipped.
pub fn reverse(s: &Configuration) -> Configuration {
    s.iter().map(|&(u, v)| (v, u)).collect()
}

/// Vertices receiving a message from every neighbour.
pub fn sinks(g: &Graph, s: &Configuration) -> VertexSet {
    g.vertices()
        .iter()
        .copied()
        .filter(|&u| {
            let nb = g.neighbours(u);
            !nb.is_empty() && nb.iter().all(|&v| s.contains(&(v, u)))
        })
        .collect()
}

/// One step backwards in time: `(s', T)` with `af_step(g, s', T) = s`.
pub fn step_back(g: &Graph, s: &Configuration) -> Result<(Configuration, VertexSet), EngineError> {
    let r = reverse(s);
    let prev = reverse(&af_step(g, &r, &VertexSet::new())?);
    Ok((prev, sinks(g, &r)))
}

/// Initiator schedule of length `k` whose replay from `∅` yields `s` at round `k`.
pub fn reconstruct_history(g: &Graph, s: &Configuration, k: usize) -> Result<Schedule, EngineError> {
    if k == 0 {
        return Err(EngineError::BadCap);
    }
    let mut cur = s.clone();
    let mut rev_sched = Vec::with_capacity(k);
    for _ in 0..k {
        let (prev, t) = step_back(g, &cur)?;
        rev_sched.push(t);
        cur = prev;
    }
    if !cur.is_empty() {
        return Err(EngineError::ReconstructionIncomplete { k, residual: cur });
    }
    rev_sched.reverse();
    Ok(rev_sched)
}

/// Number of backward steps needed to reach `∅` from `s`, searched up to `cap`.
pub fn history_length(g: &Graph, s: &Configuration, cap: usize) -> Result<Option<usize>, EngineError> {
    let mut cur = s.clone();
    for j in 0..=cap {
        if cur.is_empty() {
            return Ok(Some(j));
        }
        cur = step_back(g, &cur)?.0;
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub schedule: Schedule,
    /// `rounds[i]` is `S_{i+1}`.
    pub rounds: Vec<Configuration>,
    /// First round `r >= |schedule|` with `S_r = ∅`.
    pub terminated_at: Option<usize>,
    /// First round each vertex held the message.
    pub informed: BTreeMap<Vertex, usize>,
    pub broadcast: bool,
}

impl Trace {
    pub fn terminated(&self) -> bool {
        self.terminated_at.is_some()
    }

    /// Rounds in which at least one message was sent.
    pub fn sending_rounds(&self) -> usize {
        self.rounds.iter().filter(|s| !s.is_empty()).count()
    }

    pub fn round(&self, r: usize) -> Option<&Configuration> {
        r.checked_sub(1).and_then(|i| self.rounds.get(i))
    }

    /// Round by which every vertex was informed.
    pub fn broadcast_round(&self) -> Option<usize> {
        if self.broadcast {
            self.informed.values().copied().max()
        } else {
            None
        }
    }
}

/// Incremental trace assembly shared by every simulator in the crate.
#[derive(Clone, Debug)]
pub struct TraceBuilder {
    vertices: Vec<Vertex>,
    trace: Trace,
}

impl TraceBuilder {
    pub fn new(g: &Graph, schedule: Schedule) -> TraceBuilder {
        TraceBuilder {
            vertices: g.vertices().to_vec(),
            trace: Trace {
                schedule,
                rounds: Vec::new(),
                terminated_at: None,
                informed: BTreeMap::new(),
                broadcast: false,
            },
        }
    }

    /// Next round number to be pushed.
    pub fn next_round(&self) -> usize {
        self.trace.rounds.len() + 1
    }

    pub fn last(&self) -> Option<&Configuration> {
        self.trace.rounds.last()
    }

    /// Records `S_r`; returns true when the run has terminated.
    pub fn push(&mut self, s: Configuration) -> bool {
        let r = self.next_round();
        if let Some(i) = self.trace.schedule.get(r - 1) {
            for &v in i {
                self.trace.informed.entry(v).or_insert(r);
            }
        }
        for &(_, v) in &s {
            self.trace.informed.entry(v).or_insert(r);
        }
        let done = s.is_empty() && r >= self.trace.schedule.len();
        self.trace.rounds.push(s);
        if done {
            self.trace.terminated_at = Some(r);
        }
        done
    }

    pub fn finish(mut self) -> Trace {
        self.trace.broadcast = self.vertices.iter().all(|v| self.trace.informed.contains_key(v));
        self.trace
    }
}

/// Default cap `2|E| + |schedule| + 1`.
pub fn default_cap(g: &Graph, schedule: &Schedule) -> usize {
    2 * g.m() + schedule.len() + 1
}

/// Iterates the operator from `∅` until termination or `round_cap` rounds.
pub fn run(g: &Graph, schedule: &Schedule, round_cap: usize) -> Result<Trace, EngineError> {
    if round_cap == 0 {
        return Err(EngineError::BadCap);
    }
    for i in schedule {
        validate_vertices(g, i)?;
    }
    let empty = VertexSet::new();
    let mut b = TraceBuilder::new(g, schedule.clone());
    let mut s = Configuration::new();
    for r in 1..=round_cap {
        let i = schedule.get(r - 1).unwrap_or(&empty);
        s = af_step(g, &s, i)?;
        if b.push(s.clone()) {
            break;
        }
    }
    Ok(b.finish())
}

/// Single-source schedule `[{v}]`.
pub fn single(v: Vertex) -> Schedule {
    vec![VertexSet::from([v])]
}

/// A message path: a walk whose `i`-th step is a message of `A^i(S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessagePath {
    pub origin: Msg,
    pub walk: Vec<Vertex>,
    /// The directed edge visited twice, with the step indices of both visits.
    pub repeated: Msg,
    pub first_visit: usize,
    pub second_visit: usize,
}

/// Searches message paths of up to `horizon` steps for one that revisits a
/// directed edge. With `horizon >= 2|E|` absence certifies termination.
pub fn find_recurrent_message(g: &Graph, s: &Configuration, horizon: usize) -> Result<Option<MessagePath>, EngineError> {
    validate(g, s)?;
    let none = VertexSet::new();
    let mut configs = vec![s.clone()];
    for _ in 0..horizon {
        let next = af_step(g, configs.last().unwrap(), &none)?;
        let stop = next.is_empty();
        configs.push(next);
        if stop {
            break;
        }
    }
    for t1 in 0..configs.len() {
        for &e in &configs[t1] {
            // forward reach from e, remembering one parent per (time, arc)
            let mut layers: Vec<BTreeMap<Msg, Msg>> = vec![BTreeMap::from([(e, e)])];
            for t in t1 + 1..configs.len() {
                let prev = layers.last().unwrap();
                let mut layer = BTreeMap::new();
                for &(u, v) in &configs[t] {
                    if let Some(&p) = prev.keys().find(|&&(_, b)| b == u) {
                        layer.insert((u, v), p);
                    }
                }
                let hit = layer.contains_key(&e);
                layers.push(layer);
                if hit {
                    let t2 = t;
                    let mut arcs_fwd = vec![e];
                    let mut cur = e;
                    for back in (1..layers.len()).rev() {
                        cur = layers[back][&cur];
                        arcs_fwd.push(cur);
                    }
                    arcs_fwd.reverse(); // e (t1) ... e (t2)
                    let mut prefix = Vec::new();
                    let mut cur = e;
                    for t in (0..t1).rev() {
                        let p = *configs[t].iter().find(|&&(_, b)| b == cur.0).expect("every message has a sender");
                        prefix.push(p);
                        cur = p;
                    }
                    prefix.reverse();
                    let all: Vec<Msg> = prefix.into_iter().chain(arcs_fwd).collect();
                    let mut walk = vec![all[0].0];
                    walk.extend(all.iter().map(|m| m.1));
                    return Ok(Some(MessagePath {
                        origin: all[0],
                        walk,
                        repeated: e,
                        first_visit: t1,
                        second_visit: t2,
                    }));
                }
                if layers.last().unwrap().is_empty() {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Whether pure flooding from `s` empties within `cap` steps, by literal iteration.
pub fn empties_within(g: &Graph, s: &Configuration, cap: usize) -> Result<Option<usize>, EngineError> {
    let none = VertexSet::new();
    let mut cur = s.clone();
    for j in 0..=cap {
        if cur.is_empty() {
            return Ok(Some(j));
        }
        cur = af_step(g, &cur, &none)?;
    }
    Ok(None)
}
