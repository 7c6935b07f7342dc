//! Unrolling an FEC into a single even cycle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::engine::Configuration;
use crate::graph::{Fec, Msg, Vertex};

/// A vertex of the unrolled cycle: the original vertex and a copy flag.
/// Copy 1 marks the duplicates `a_{-1}`, `c_{-1}` and `d_i`.
pub type RepVertex = (Vertex, u8);
pub type RepMsg = (RepVertex, RepVertex);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenCycleRep {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    /// `a_0 .. a_{2x} a_{-1} d_1 .. d_{y-1} c_{-1} c_{2z} .. c_1 c_0 b_{y-1} .. b_1`,
    /// closing back to `a_0`. For `y = 0` the `b`, `d` and `c_0` entries are
    /// absent because `c_0 = a_0` and `c_{-1} = a_{-1}`.
    pub seq: Vec<RepVertex>,
}

impl EvenCycleRep {
    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn position(&self, v: RepVertex) -> Option<usize> {
        self.seq.iter().position(|&w| w == v)
    }

    /// Original vertex a rep vertex stands for.
    pub fn maps_to(v: RepVertex) -> Vertex {
        v.0
    }
}

pub fn even_cycle_rep(f: &Fec) -> EvenCycleRep {
    let mut seq: Vec<RepVertex> = f.a.iter().map(|&v| (v, 0)).collect();
    seq.push((f.a[0], 1));
    let inner = f.connector();
    if f.y == 0 {
        seq.extend(f.c[1..].iter().rev().map(|&v| (v, 0)));
    } else {
        seq.extend(inner.iter().map(|&v| (v, 1)));
        seq.push((f.c[0], 1));
        seq.extend(f.c[1..].iter().rev().map(|&v| (v, 0)));
        seq.push((f.c[0], 0));
        seq.extend(inner.iter().rev().map(|&v| (v, 0)));
    }
    EvenCycleRep { x: f.x, y: f.y, z: f.z, seq }
}

/// Images of one message of the FEC on the unrolled cycle.
pub fn lift_message(f: &Fec, m: Msg) -> Vec<RepMsg> {
    let (u, v) = m;
    let a0 = f.a[0];
    let a2x = *f.a.last().unwrap();
    let c0 = f.c[0];
    let c2z = *f.c.last().unwrap();
    // wrap edges of the two cycles are re-targeted at the copies
    if m == (a2x, a0) {
        return vec![((a2x, 0), (a0, 1))];
    }
    if m == (a0, a2x) {
        return vec![((a0, 1), (a2x, 0))];
    }
    if m == (c2z, c0) {
        return vec![((c2z, 0), (c0, 1))];
    }
    if m == (c0, c2z) {
        return vec![((c0, 1), (c2z, 0))];
    }
    let on_path = f
        .path_edges()
        .iter()
        .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u));
    if on_path {
        return vec![((u, 0), (v, 0)), ((u, 1), (v, 1))];
    }
    vec![((u, 0), (v, 0))]
}

/// The unrolled configuration; messages off the FEC are dropped.
pub fn lift_configuration(f: &Fec, s: &Configuration) -> BTreeSet<RepMsg> {
    let edges = f.edges();
    s.iter()
        .filter(|&&(u, v)| edges.contains(&(u.min(v), u.max(v))))
        .flat_map(|&m| lift_message(f, m))
        .collect()
}
