//! Running a table on a labelled graph.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::table::{Id, IdSet, Key, ProtocolTable};
use super::ProtoError;
use crate::engine::{single, Configuration, Trace, TraceBuilder};
use crate::graph::{Graph, Vertex};

pub type Labelling = BTreeMap<Vertex, Id>;

/// One suite member: a graph, an identifier assignment and an initiator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledCase {
    pub graph: Graph,
    pub labelling: Labelling,
    pub source: Vertex,
}

/// Dense form used by the inner loops. Vertex `i` is the graph's index `i`.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub n: usize,
    pub labels: Vec<Id>,
    pub nmask: Vec<IdSet>,
    pub nbrs: Vec<Vec<usize>>,
    pub source: usize,
}

/// States are per-vertex received-from sets packed one byte per vertex.
pub(crate) type State = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Fate {
    /// `S_r = ∅`.
    Empty(usize),
    /// `S_r` repeats `S_first`.
    Repeat { first: usize, at: usize },
    Capped(usize),
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct RunResult {
    pub fate: Fate,
    /// Vertex index bitmask.
    pub informed: u16,
}

impl RunResult {
    pub fn good(&self, c: &Compiled) -> bool {
        matches!(self.fate, Fate::Empty(_)) && self.informed.count_ones() as usize == c.n
    }
}

impl Compiled {
    pub fn new(p: &ProtocolTable, case: &LabelledCase) -> Result<Compiled, ProtoError> {
        let g = &case.graph;
        let n = g.n();
        let source = g.index(case.source).ok_or(ProtoError::UnknownSource(case.source))?;
        let mut labels = Vec::with_capacity(n);
        let mut used: IdSet = 0;
        for &v in g.vertices() {
            let &l = case.labelling.get(&v).ok_or(ProtoError::Unlabelled(v))?;
            if l >= p.universe() {
                return Err(ProtoError::LabelOutside(v, l));
            }
            if used >> l & 1 == 1 {
                return Err(ProtoError::NotInjective(l));
            }
            used |= 1 << l;
            labels.push(l);
        }
        let mut nbrs = Vec::with_capacity(n);
        let mut nmask = Vec::with_capacity(n);
        for &v in g.vertices() {
            let d = g.degree(v);
            if d > p.d_max() as usize {
                return Err(ProtoError::Degree { vertex: v, degree: d, d_max: p.d_max() });
            }
            let ns: Vec<usize> = g.neighbours(v).into_iter().map(|w| g.index(w).unwrap()).collect();
            nmask.push(ns.iter().fold(0, |m, &j| m | 1 << labels[j]));
            nbrs.push(ns);
        }
        Ok(Compiled { n, labels, nmask, nbrs, source })
    }

    #[inline]
    fn deliver(&self, next: &mut State, from: usize, send: IdSet) {
        let bit = 1u64 << self.labels[from];
        for &j in &self.nbrs[from] {
            if send >> self.labels[j] & 1 == 1 {
                *next |= bit << (8 * j);
            }
        }
    }

    pub fn first(&self, p: &ProtocolTable) -> Result<State, Key> {
        let k = Key { id: self.labels[self.source], neighbours: self.nmask[self.source], received: 0 };
        let send = p.get_unchecked(k);
        if send == 0xFF {
            return Err(k);
        }
        let mut s = 0;
        self.deliver(&mut s, self.source, send);
        Ok(s)
    }

    pub fn next(&self, p: &ProtocolTable, s: State) -> Result<State, Key> {
        let mut out = 0;
        for i in 0..self.n {
            let r = (s >> (8 * i)) as u8;
            if r == 0 {
                continue;
            }
            let k = Key { id: self.labels[i], neighbours: self.nmask[i], received: r };
            let send = p.get_unchecked(k);
            if send == 0xFF {
                return Err(k);
            }
            self.deliver(&mut out, i, send);
        }
        Ok(out)
    }

    pub fn receivers(&self, s: State) -> u16 {
        (0..self.n).filter(|&i| (s >> (8 * i)) as u8 != 0).fold(0, |m, i| m | 1 << i)
    }

    /// Runs to `∅`, a repeated state, or `cap` rounds; `Err` names the
    /// first unassigned entry consulted.
    pub fn run(&self, p: &ProtocolTable, cap: Option<usize>, mut visit: impl FnMut(State)) -> Result<RunResult, Key> {
        let mut s = self.first(p)?;
        let mut informed = 1u16 << self.source;
        let mut seen: Vec<State> = Vec::new();
        let mut index: HashMap<State, usize> = HashMap::new();
        let mut r = 1;
        loop {
            visit(s);
            informed |= self.receivers(s);
            if s == 0 {
                return Ok(RunResult { fate: Fate::Empty(r), informed });
            }
            let prev = if seen.len() < 32 {
                seen.iter().position(|&x| x == s).map(|i| i + 1)
            } else {
                index.get(&s).copied()
            };
            if let Some(first) = prev {
                return Ok(RunResult { fate: Fate::Repeat { first, at: r }, informed });
            }
            if seen.len() < 32 {
                seen.push(s);
                if seen.len() == 32 {
                    index.extend(seen.iter().enumerate().map(|(i, &x)| (x, i + 1)));
                }
            } else {
                index.insert(s, r);
            }
            if cap.is_some_and(|c| r >= c) {
                return Ok(RunResult { fate: Fate::Capped(r), informed });
            }
            s = self.next(p, s)?;
            r += 1;
        }
    }

    pub fn configuration(&self, g: &Graph, s: State) -> Configuration {
        let mut out = Configuration::new();
        for j in 0..self.n {
            let r = (s >> (8 * j)) as u8;
            for &i in &self.nbrs[j] {
                if r >> self.labels[i] & 1 == 1 {
                    out.insert((g.id(i), g.id(j)));
                }
            }
        }
        out
    }
}

fn unassigned(k: Key) -> ProtoError {
    ProtoError::Unassigned(k.to_string())
}

/// Round 1 sends `b(label, neighbour labels)` from the source; afterwards
/// every vertex sends `f(label, neighbour labels, received-from labels)`.
/// Stops at `∅` or after `round_cap` rounds.
pub fn simulate_protocol(p: &ProtocolTable, g: &Graph, labelling: &Labelling, source: Vertex, round_cap: usize) -> Result<Trace, ProtoError> {
    if round_cap == 0 {
        return Err(ProtoError::BadCap);
    }
    let case = LabelledCase { graph: g.clone(), labelling: labelling.clone(), source };
    let c = Compiled::new(p, &case)?;
    let mut b = TraceBuilder::new(g, single(source));
    let mut s = c.first(p).map_err(unassigned)?;
    for _ in 0..round_cap {
        if b.push(c.configuration(g, s)) {
            break;
        }
        if b.next_round() > round_cap {
            break;
        }
        s = c.next(p, s).map_err(unassigned)?;
    }
    Ok(b.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    /// Quiesced with some vertex never informed.
    Uninformed,
    /// The configuration of `round` repeats an earlier one.
    Repeats,
    /// Still running at the cap.
    Capped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub case: LabelledCase,
    pub round: usize,
    pub failure: Failure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub correct: bool,
    pub terminating: bool,
    pub counterexample: Option<Counterexample>,
}

/// Runs every suite member. A repeated configuration proves
/// non-termination outright; otherwise a run still going at `round_cap`
/// counts as non-terminating.
pub fn check_protocol(p: &ProtocolTable, suite: &[LabelledCase], round_cap: usize) -> Result<CheckReport, ProtoError> {
    let mut report = CheckReport { correct: true, terminating: true, counterexample: None };
    for case in suite {
        let c = Compiled::new(p, case)?;
        let res = c.run(p, Some(round_cap), |_| {}).map_err(unassigned)?;
        let found = match res.fate {
            Fate::Empty(r) => {
                if res.informed.count_ones() as usize != c.n {
                    report.correct = false;
                    Some((r, Failure::Uninformed))
                } else {
                    None
                }
            }
            Fate::Repeat { at, .. } => {
                report.terminating = false;
                if res.informed.count_ones() as usize != c.n {
                    report.correct = false;
                }
                Some((at, Failure::Repeats))
            }
            Fate::Capped(r) => {
                report.terminating = false;
                if res.informed.count_ones() as usize != c.n {
                    report.correct = false;
                }
                Some((r, Failure::Capped))
            }
        };
        if let (Some((round, failure)), None) = (found, &report.counterexample) {
            report.counterexample = Some(Counterexample { case: case.clone(), round, failure });
        }
    }
    Ok(report)
}
