//! The leaf-echo digraph and the necessary conditions read off a table.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::table::{ids, Id, Key, ProtocolTable};

/// Arc `u -> v` when a leaf `u` hanging off `v` answers `v` by echoing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviourDigraph {
    pub universe: u8,
    pub arcs: BTreeSet<(Id, Id)>,
}

impl BehaviourDigraph {
    pub fn of(p: &ProtocolTable) -> BehaviourDigraph {
        let mut arcs = BTreeSet::new();
        for u in 0..p.universe() {
            for v in 0..p.universe() {
                if u != v && p.get(Key::f(u, &[v], &[v])) == Some(1 << v) {
                    arcs.insert((u, v));
                }
            }
        }
        BehaviourDigraph { universe: p.universe(), arcs }
    }

    pub fn has_arc(&self, u: Id, v: Id) -> bool {
        self.arcs.contains(&(u, v))
    }

    /// An injective placement of `pattern`'s vertices `0..k` preserving arcs.
    pub fn embed(&self, k: usize, pattern: &[(usize, usize)]) -> Option<Vec<Id>> {
        let mut place: Vec<Id> = Vec::with_capacity(k);
        self.extend(k, pattern, &mut place).then_some(place)
    }

    /// Every injective placement of `pattern` preserving arcs.
    pub fn embeddings(&self, k: usize, pattern: &[(usize, usize)]) -> Vec<Vec<Id>> {
        let mut out = Vec::new();
        let mut place = Vec::with_capacity(k);
        self.collect(k, pattern, &mut place, &mut out);
        out
    }

    fn collect(&self, k: usize, pattern: &[(usize, usize)], place: &mut Vec<Id>, out: &mut Vec<Vec<Id>>) {
        if place.len() == k {
            out.push(place.clone());
            return;
        }
        let i = place.len();
        for x in 0..self.universe {
            if place.contains(&x) {
                continue;
            }
            place.push(x);
            if pattern.iter().all(|&(a, b)| a.max(b) != i || self.has_arc(place[a], place[b])) {
                self.collect(k, pattern, place, out);
            }
            place.pop();
        }
    }

    fn extend(&self, k: usize, pattern: &[(usize, usize)], place: &mut Vec<Id>) -> bool {
        if place.len() == k {
            return true;
        }
        let i = place.len();
        for x in 0..self.universe {
            if place.contains(&x) {
                continue;
            }
            place.push(x);
            let ok = pattern.iter().all(|&(a, b)| a.max(b) != i || self.has_arc(place[a], place[b]));
            if ok && self.extend(k, pattern, place) {
                return true;
            }
            place.pop();
        }
        false
    }
}

/// Two vertex-disjoint joins `u -> v <- w` and `x -> y <- z`.
pub const FORBIDDEN_VERTICES: usize = 6;
pub const FORBIDDEN_ARCS: [(usize, usize); 4] = [(0, 1), (2, 1), (3, 4), (5, 4)];

/// True when the echo digraph contains no copy of the forbidden pattern.
pub fn forbidden_digraph_check(p: &ProtocolTable) -> bool {
    BehaviourDigraph::of(p).embed(FORBIDDEN_VERTICES, &FORBIDDEN_ARCS).is_none()
}

/// A broken necessary condition and the entry that breaks it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub clause: u8,
    /// The entry found wrong or missing.
    pub key: Key,
    pub entry: String,
    /// Identifiers the broken instance involves.
    pub support: Vec<Id>,
}

/// The four necessary conditions on a terminating, correct protocol:
///
/// 1. `b(u, S)` is never empty.
/// 2. `f(v, {u, w}, {u})` always contains `w`.
/// 3. If `u` echoes towards `v` then `f(v, {u}, {u}) = ∅`.
/// 4. If `u` and `w` both echo towards `v` then `v`, hearing from one of
///    them, sends to both for at least one of the two, and
///    `f(v, {u, w}, {u, w}) = ∅`.
///
/// Only assigned entries are judged. In clauses 3 and 4 a hypothesis that
/// holds with its conclusion unassigned is reported as a violation.
pub fn necessary_conditions(p: &ProtocolTable) -> Vec<Violation> {
    let mut out = Vec::new();
    let d = BehaviourDigraph::of(p);
    let k = p.universe();
    let mut flag = |clause: u8, key: Key, support: u8| {
        out.push(Violation { clause, key, entry: key.to_string(), support: ids(support).collect() })
    };
    for (key, v) in p.assigned() {
        if key.is_initial() && v == 0 {
            flag(1, key, key.support());
        }
        if !key.is_initial() && key.neighbours.count_ones() == 2 && key.received.count_ones() == 1 {
            let other = key.neighbours & !key.received;
            if v & other == 0 {
                flag(2, key, key.support());
            }
        }
    }
    for &(u, v) in &d.arcs {
        let back = Key::f(v, &[u], &[u]);
        if p.get(back) != Some(0) {
            flag(3, back, back.support());
        }
    }
    for v in 0..k {
        for u in 0..k {
            for w in u + 1..k {
                if u == v || w == v || !d.has_arc(u, v) || !d.has_arc(w, v) {
                    continue;
                }
                if p.d_max() < 2 {
                    continue;
                }
                let both = (1 << u) | (1 << w);
                let from_u = Key::f(v, &[u, w], &[u]);
                let from_w = Key::f(v, &[u, w], &[w]);
                if p.get(from_u) != Some(both) && p.get(from_w) != Some(both) {
                    flag(4, from_u, from_u.support());
                }
                let from_both = Key::f(v, &[u, w], &[u, w]);
                if p.get(from_both) != Some(0) {
                    flag(4, from_both, from_both.support());
                }
            }
        }
    }
    out
}
