//! Bitmask form of configurations for graphs with at most 64 edges.
//!
//! Edge `e` (the `e`-th edge in lexicographic order, `a < b`) owns arc `2e`
//! for `(a, b)` and arc `2e + 1` for `(b, a)`, so reversing a configuration
//! is a swap of adjacent bits.

use std::collections::{HashMap, HashSet};

use super::{Configuration, EngineError};
use crate::graph::{Graph, Msg, Vertex};

pub type Mask = u128;
/// Vertex sets by dense index.
pub type VMask = u128;

const EVEN: Mask = 0x5555_5555_5555_5555_5555_5555_5555_5555;

#[derive(Clone, Debug)]
pub struct ArcTable {
    n: usize,
    ids: Vec<Vertex>,
    /// arc -> (sender, receiver) dense indices
    arcs: Vec<(usize, usize)>,
    out: Vec<Mask>,
    inn: Vec<Mask>,
    lookup: HashMap<Msg, usize>,
    full: Mask,
}

impl ArcTable {
    pub const MAX_EDGES: usize = 64;

    pub fn new(g: &Graph) -> Option<ArcTable> {
        if g.m() > Self::MAX_EDGES || g.n() > 128 {
            return None;
        }
        let n = g.n();
        let mut arcs = Vec::with_capacity(2 * g.m());
        for &(a, b) in g.edge_idx() {
            arcs.push((a, b));
            arcs.push((b, a));
        }
        let mut out = vec![0; n];
        let mut inn = vec![0; n];
        let mut lookup = HashMap::new();
        for (k, &(a, b)) in arcs.iter().enumerate() {
            out[a] |= 1 << k;
            inn[b] |= 1 << k;
            lookup.insert((g.id(a), g.id(b)), k);
        }
        let full = if arcs.len() == 128 { Mask::MAX } else { (1 << arcs.len()) - 1 };
        Some(ArcTable {
            n,
            ids: g.vertices().to_vec(),
            arcs,
            out,
            inn,
            lookup,
            full,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn full(&self) -> Mask {
        self.full
    }

    pub fn arc(&self, k: usize) -> (usize, usize) {
        self.arcs[k]
    }

    pub fn arc_msg(&self, k: usize) -> Msg {
        let (a, b) = self.arcs[k];
        (self.ids[a], self.ids[b])
    }

    pub fn arc_index(&self, m: Msg) -> Option<usize> {
        self.lookup.get(&m).copied()
    }

    pub fn out_mask(&self, v: usize) -> Mask {
        self.out[v]
    }

    pub fn in_mask(&self, v: usize) -> Mask {
        self.inn[v]
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    pub fn id(&self, i: usize) -> Vertex {
        self.ids[i]
    }

    pub fn vmask_of(&self, vs: impl IntoIterator<Item = Vertex>) -> Result<VMask, EngineError> {
        let mut m = 0;
        for v in vs {
            let i = self.vertex_index(v).ok_or(EngineError::UnknownVertex(v))?;
            m |= 1 << i;
        }
        Ok(m)
    }

    pub fn mask_of(&self, s: &Configuration) -> Result<Mask, EngineError> {
        let mut m = 0;
        for &msg in s {
            let k = self.arc_index(msg).ok_or(EngineError::NoEdge(msg.0, msg.1))?;
            m |= 1 << k;
        }
        Ok(m)
    }

    pub fn config_of(&self, m: Mask) -> Configuration {
        bits(m).map(|k| self.arc_msg(k)).collect()
    }

    #[inline]
    pub fn reverse(&self, s: Mask) -> Mask {
        ((s & EVEN) << 1) | ((s >> 1) & EVEN)
    }

    /// Vertices that receive at least one message of `s`.
    #[inline]
    pub fn receivers(&self, s: Mask) -> VMask {
        let mut r = 0;
        for k in bits(s) {
            r |= 1 << self.arcs[k].1;
        }
        r
    }

    /// Vertices receiving a message from every neighbour.
    pub fn sinks(&self, s: Mask) -> VMask {
        let mut r = 0;
        for v in 0..self.n {
            if self.inn[v] & s == self.inn[v] && self.inn[v] != 0 {
                r |= 1 << v;
            }
        }
        r
    }

    /// Union of the out-arcs of every vertex in `vs`.
    #[inline]
    pub fn out_of(&self, vs: VMask) -> Mask {
        let mut m = 0;
        for v in vbits(vs) {
            m |= self.out[v];
        }
        m
    }

    /// One round of the flooding operator.
    #[inline]
    pub fn step(&self, s: Mask, init: VMask) -> Mask {
        self.out_of(self.receivers(s) | init) & !self.reverse(s)
    }

    /// Least `j <= k` with `A^j(s) = ∅`.
    pub fn empties_within(&self, mut s: Mask, k: usize) -> Option<usize> {
        for j in 0..=k {
            if s == 0 {
                return Some(j);
            }
            s = self.step(s, 0);
        }
        None
    }

    /// Exact quiescence time by repeated-configuration detection.
    pub fn quiescence(&self, mut s: Mask) -> Option<usize> {
        let mut seen = HashSet::new();
        let mut j = 0;
        while s != 0 {
            if !seen.insert(s) {
                return None;
            }
            s = self.step(s, 0);
            j += 1;
        }
        Some(j)
    }
}

/// Iterator over set bit positions.
pub fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let k = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(k)
        }
    })
}

pub fn vbits(m: VMask) -> impl Iterator<Item = usize> {
    bits(m)
}
