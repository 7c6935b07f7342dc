//! Balance over every cycle and FEC subgraph, and the simulation oracle it is
//! checked against.

pub mod linear;
mod rep;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use rep::{even_cycle_rep, lift_configuration, lift_message, EvenCycleRep, RepMsg, RepVertex};

use crate::engine::{self, ArcTable, Configuration, EngineError, Mask};
use crate::graph::{enumerate_cycles, enumerate_fecs, Cycle, Fec, Graph, Msg};
use linear::{from_i64, ModBasis};

/// Largest vertex count for exhaustive subgraph enumeration.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BalanceError {
    #[error("graph has {n} vertices; exhaustive enumeration is limited to {bound}, use the simulation oracle instead")]
    TooLarge { n: usize, bound: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Literal balance test on a closed sequence of distinct vertices.
///
/// Odd length: as many clockwise as anti-clockwise messages. Even length:
/// for each message, the clockwise and anti-clockwise messages whose heads lie
/// an even distance from its head are equally many (the message counts itself).
pub fn seq_balanced<T: Ord + Copy>(seq: &[T], s: &BTreeSet<(T, T)>) -> bool {
    let k = seq.len();
    // (head position, clockwise?)
    let mut on: Vec<(usize, bool)> = Vec::new();
    for i in 0..k {
        let (a, b) = (seq[i], seq[(i + 1) % k]);
        if s.contains(&(a, b)) {
            on.push((i, true));
        }
        if s.contains(&(b, a)) {
            on.push(((i + 1) % k, false));
        }
    }
    if k % 2 == 1 {
        let cw = on.iter().filter(|m| m.1).count();
        return 2 * cw == on.len();
    }
    on.iter().all(|&(h, _)| {
        let same = |cw: bool| on.iter().filter(|&&(h2, d)| d == cw && (h2 + k - h) % 2 == 0).count();
        same(true) == same(false)
    })
}

pub fn cycle_balanced(c: &Cycle, s: &Configuration) -> bool {
    seq_balanced(&c.vertices, s)
}

/// Balance of an FEC through its unrolled even cycle.
pub fn fec_balanced(f: &Fec, s: &Configuration) -> bool {
    let rep = even_cycle_rep(f);
    seq_balanced(&rep.seq, &lift_configuration(f, s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Cycle { cycle: Cycle, restriction: Vec<Msg> },
    Fec { fec: Fec, restriction: Vec<Msg> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceVerdict {
    pub balanced: bool,
    pub witness: Option<Witness>,
}

/// All cycles and FECs of a graph, computed once.
#[derive(Clone, Debug)]
pub struct Structures {
    pub cycles: Vec<Cycle>,
    pub fecs: Vec<Fec>,
}

impl Structures {
    pub fn new(g: &Graph) -> Result<Structures, BalanceError> {
        if g.n() > MAX_EXHAUSTIVE_VERTICES {
            return Err(BalanceError::TooLarge { n: g.n(), bound: MAX_EXHAUSTIVE_VERTICES });
        }
        Ok(Structures {
            cycles: enumerate_cycles(g, g.n()),
            fecs: enumerate_fecs(g),
        })
    }

    pub fn check(&self, s: &Configuration) -> BalanceVerdict {
        for c in &self.cycles {
            if !cycle_balanced(c, s) {
                let restriction = s.iter().copied().filter(|&(u, v)| c.has_edge(u, v)).collect();
                return BalanceVerdict {
                    balanced: false,
                    witness: Some(Witness::Cycle { cycle: c.clone(), restriction }),
                };
            }
        }
        for f in &self.fecs {
            if !fec_balanced(f, s) {
                let restriction = s.iter().copied().filter(|&(u, v)| f.has_edge(u, v)).collect();
                return BalanceVerdict {
                    balanced: false,
                    witness: Some(Witness::Fec { fec: f.clone(), restriction }),
                };
            }
        }
        BalanceVerdict { balanced: true, witness: None }
    }
}

/// Balance on every cycle and FEC of `g`, with the first offending structure.
pub fn is_balanced(g: &Graph, s: &Configuration) -> Result<BalanceVerdict, BalanceError> {
    engine::validate(g, s)?;
    Ok(Structures::new(g)?.check(s))
}

/// Signed per-arc weights of one structure, split by channel. A
/// configuration is balanced on the structure iff every channel sums to zero.
pub fn cycle_weights(c: &Cycle) -> Vec<Vec<(Msg, i64)>> {
    let seq: Vec<(u32, u8)> = c.vertices.iter().map(|&v| (v, 0)).collect();
    let w = seq_weights(&seq);
    w.into_iter()
        .map(|ch| ch.into_iter().map(|(((u, _), (v, _)), x)| ((u, v), x)).collect())
        .collect()
}

fn seq_weights(seq: &[RepVertex]) -> Vec<Vec<(RepMsg, i64)>> {
    let k = seq.len();
    let mut ch = vec![Vec::new(); if k % 2 == 0 { 2 } else { 1 }];
    for i in 0..k {
        let (a, b) = (seq[i], seq[(i + 1) % k]);
        if k % 2 == 1 {
            ch[0].push(((a, b), 1));
            ch[0].push(((b, a), -1));
        } else {
            ch[i % 2].push(((a, b), 1));
            ch[(i + 1) % 2].push(((b, a), -1));
        }
    }
    ch
}

pub fn fec_weights(f: &Fec) -> Vec<Vec<(Msg, i64)>> {
    let rep = even_cycle_rep(f);
    let rep_w = seq_weights(&rep.seq);
    let mut out = vec![Vec::new(); 2];
    for (a, b) in f.edges() {
        for m in [(a, b), (b, a)] {
            for lifted in lift_message(f, m) {
                for (c, ch) in rep_w.iter().enumerate() {
                    for &(rm, w) in ch {
                        if rm == lifted {
                            out[c].push((m, w));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Bitmask balance test: an exact basis of every structure's functionals.
#[derive(Clone, Debug)]
pub struct BalanceChecker {
    pub table: ArcTable,
    basis: ModBasis,
    structures: Structures,
}

impl BalanceChecker {
    pub fn new(g: &Graph) -> Result<BalanceChecker, BalanceError> {
        let table = ArcTable::new(g).ok_or(BalanceError::TooLarge { n: g.n(), bound: MAX_EXHAUSTIVE_VERTICES })?;
        let structures = Structures::new(g)?;
        let mut basis = ModBasis::new();
        let arcs = table.arc_count();
        let mut add = |chs: Vec<Vec<(Msg, i64)>>| {
            for ch in chs {
                let mut row = vec![0i64; arcs];
                for (m, w) in ch {
                    row[table.arc_index(m).expect("structure arc")] += w;
                }
                if basis.rank() < arcs {
                    basis.insert(row.into_iter().map(from_i64).collect());
                }
            }
        };
        for c in &structures.cycles {
            add(cycle_weights(c));
        }
        for f in &structures.fecs {
            add(fec_weights(f));
        }
        Ok(BalanceChecker { table, basis, structures })
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn structures(&self) -> &Structures {
        &self.structures
    }

    #[inline]
    pub fn balanced_mask(&self, s: Mask) -> bool {
        self.basis.annihilates(s)
    }

    pub fn check(&self, s: &Configuration) -> Result<BalanceVerdict, BalanceError> {
        let m = self.table.mask_of(s)?;
        if self.balanced_mask(m) {
            Ok(BalanceVerdict { balanced: true, witness: None })
        } else {
            Ok(self.structures.check(s))
        }
    }
}

/// Pure flooding from `s` reaches `∅` within `2|E|` steps.
pub fn terminates_oracle(g: &Graph, s: &Configuration) -> Result<bool, EngineError> {
    engine::validate(g, s)?;
    let cap = 2 * g.m();
    if let Some(t) = ArcTable::new(g) {
        return Ok(t.empties_within(t.mask_of(s)?, cap).is_some());
    }
    Ok(engine::empties_within(g, s, cap)?.is_some())
}

/// Exact termination by repeated-configuration detection, with the number of
/// steps to reach `∅` when it does.
pub fn quiescence_exact(g: &Graph, s: &Configuration) -> Result<Option<usize>, EngineError> {
    engine::validate(g, s)?;
    if let Some(t) = ArcTable::new(g) {
        return Ok(t.quiescence(t.mask_of(s)?));
    }
    let none = engine::VertexSet::new();
    let mut seen = std::collections::HashSet::new();
    let mut cur = s.clone();
    let mut j = 0;
    while !cur.is_empty() {
        if !seen.insert(cur.clone()) {
            return Ok(None);
        }
        cur = engine::af_step(g, &cur, &none)?;
        j += 1;
    }
    Ok(Some(j))
}
