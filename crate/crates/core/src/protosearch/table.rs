//! Explicit `(b, f)` tables over a bounded identifier universe.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ProtoError;

/// Node identifier. Universes are `0..size` with `size <= MAX_UNIVERSE`.
pub type Id = u8;
/// A set of identifiers, bit `i` standing for identifier `i`.
pub type IdSet = u8;

pub const MAX_UNIVERSE: u8 = 8;
const UNSET: u8 = 0xFF;

pub fn ids(set: IdSet) -> impl Iterator<Item = Id> {
    (0..8).filter(move |i| set >> i & 1 == 1)
}

pub fn set_of(items: &[Id]) -> IdSet {
    items.iter().fold(0, |m, &i| m | 1 << i)
}

fn fmt_set(set: IdSet) -> String {
    ids(set).map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

/// One table input. `received == 0` addresses the initial function `b`;
/// otherwise it addresses `f(id, neighbours, received)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key {
    pub id: Id,
    pub neighbours: IdSet,
    pub received: IdSet,
}

impl Key {
    pub fn b(id: Id, neighbours: &[Id]) -> Key {
        Key { id, neighbours: set_of(neighbours), received: 0 }
    }

    pub fn f(id: Id, neighbours: &[Id], received: &[Id]) -> Key {
        Key { id, neighbours: set_of(neighbours), received: set_of(received) }
    }

    pub fn is_initial(&self) -> bool {
        self.received == 0
    }

    /// Identifiers the entry mentions.
    pub fn support(&self) -> IdSet {
        self.neighbours | 1 << self.id
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_initial() {
            write!(f, "b({}, {{{}}})", self.id, fmt_set(self.neighbours))
        } else {
            write!(f, "f({}, {{{}}}, {{{}}})", self.id, fmt_set(self.neighbours), fmt_set(self.received))
        }
    }
}

/// A stateless protocol. Entries may be left unassigned: search survivors
/// only fix the inputs their suite actually exercised.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "TableRepr", try_from = "TableRepr")]
pub struct ProtocolTable {
    universe: u8,
    d_max: u8,
    values: Vec<u8>,
}

impl fmt::Debug for ProtocolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (k, v) in self.assigned() {
            m.entry(&format_args!("{k}"), &format_args!("{{{}}}", fmt_set(v)));
        }
        m.finish()
    }
}

impl ProtocolTable {
    /// A table with every entry unassigned.
    pub fn empty(universe: u8, d_max: u8) -> Result<ProtocolTable, ProtoError> {
        if universe < 2 || universe > MAX_UNIVERSE {
            return Err(ProtoError::Universe(universe));
        }
        if d_max == 0 {
            return Err(ProtoError::DegreeBound);
        }
        let k = universe as usize;
        Ok(ProtocolTable { universe, d_max, values: vec![UNSET; k << (2 * k)] })
    }

    /// Every entry set by `rule(key)`.
    pub fn from_fn(universe: u8, d_max: u8, mut rule: impl FnMut(Key) -> IdSet) -> Result<ProtocolTable, ProtoError> {
        let mut t = ProtocolTable::empty(universe, d_max)?;
        for k in t.domain() {
            let v = rule(k) & k.neighbours;
            t.set_unchecked(k, v);
        }
        Ok(t)
    }

    pub fn universe(&self) -> u8 {
        self.universe
    }

    pub fn d_max(&self) -> u8 {
        self.d_max
    }

    fn slot(&self, k: Key) -> usize {
        let u = self.universe as usize;
        ((k.id as usize) << (2 * u)) | ((k.neighbours as usize) << u) | k.received as usize
    }

    pub fn in_domain(&self, k: Key) -> bool {
        let full: u16 = (1u16 << self.universe) - 1;
        let n = k.neighbours.count_ones();
        k.id < self.universe
            && (k.neighbours as u16) & !full == 0
            && k.neighbours >> k.id & 1 == 0
            && n >= 1
            && n <= self.d_max as u32
            && k.received & !k.neighbours == 0
    }

    /// Every input of the declared domain in key order.
    pub fn domain(&self) -> Vec<Key> {
        let mut out = Vec::new();
        let full = ((1u16 << self.universe) - 1) as u8;
        for id in 0..self.universe {
            for n in 1..=full {
                // submasks of n, including 0 for b
                let mut r = n;
                let mut sub = Vec::new();
                loop {
                    sub.push(r);
                    if r == 0 {
                        break;
                    }
                    r = (r - 1) & n;
                }
                sub.reverse();
                for r in sub {
                    let k = Key { id, neighbours: n, received: r };
                    if self.in_domain(k) {
                        out.push(k);
                    }
                }
            }
        }
        out
    }

    /// `None` for unassigned entries. `f(u, N, ∅)` is always `∅` and is
    /// reached through [`ProtocolTable::send`], not here.
    pub fn get(&self, k: Key) -> Option<IdSet> {
        if !self.in_domain(k) {
            return None;
        }
        match self.values[self.slot(k)] {
            UNSET => None,
            v => Some(v),
        }
    }

    pub(crate) fn get_unchecked(&self, k: Key) -> u8 {
        self.values[self.slot(k)]
    }

    pub fn set(&mut self, k: Key, value: IdSet) -> Result<(), ProtoError> {
        if !self.in_domain(k) {
            return Err(ProtoError::OutOfDomain(k.to_string()));
        }
        if value & !k.neighbours != 0 {
            return Err(ProtoError::NotNeighbours(k.to_string()));
        }
        let s = self.slot(k);
        self.values[s] = value;
        Ok(())
    }

    pub(crate) fn set_unchecked(&mut self, k: Key, value: u8) {
        let s = self.slot(k);
        self.values[s] = value;
    }

    pub fn unset(&mut self, k: Key) {
        if self.in_domain(k) {
            let s = self.slot(k);
            self.values[s] = UNSET;
        }
    }

    /// Initial function.
    pub fn b(&self, id: Id, neighbours: &[Id]) -> Option<IdSet> {
        self.get(Key::b(id, neighbours))
    }

    /// Forwarding function; `f(u, N, ∅) = ∅`.
    pub fn f(&self, id: Id, neighbours: &[Id], received: &[Id]) -> Option<IdSet> {
        if received.is_empty() {
            return Some(0);
        }
        self.get(Key::f(id, neighbours, received))
    }

    pub fn assigned(&self) -> impl Iterator<Item = (Key, IdSet)> + '_ {
        self.domain().into_iter().filter_map(|k| self.get(k).map(|v| (k, v)))
    }

    pub fn assigned_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != UNSET).count()
    }

    pub fn is_total(&self) -> bool {
        self.domain().into_iter().all(|k| self.get(k).is_some())
    }

    /// The same protocol with identifiers renamed by `perm`.
    pub fn permuted(&self, perm: &[Id]) -> ProtocolTable {
        let map = |s: IdSet| ids(s).fold(0, |m, i| m | 1 << perm[i as usize]);
        let mut out = ProtocolTable { universe: self.universe, d_max: self.d_max, values: vec![UNSET; self.values.len()] };
        for (k, v) in self.assigned() {
            let nk = Key { id: perm[k.id as usize], neighbours: map(k.neighbours), received: map(k.received) };
            out.set_unchecked(nk, map(v));
        }
        out
    }
}

/// `b(u, N) = N` and `f(u, N, T) = N \ T`.
pub fn af_table(universe: u8, d_max: u8) -> Result<ProtocolTable, ProtoError> {
    ProtocolTable::from_fn(universe, d_max, |k| k.neighbours & !k.received)
}

#[derive(Clone, Serialize, Deserialize)]
struct TableRepr {
    universe: u8,
    d_max: u8,
    b: BTreeMap<String, Vec<Id>>,
    f: BTreeMap<String, Vec<Id>>,
}

impl From<ProtocolTable> for TableRepr {
    fn from(t: ProtocolTable) -> TableRepr {
        let mut b = BTreeMap::new();
        let mut f = BTreeMap::new();
        for (k, v) in t.assigned() {
            let send: Vec<Id> = ids(v).collect();
            if k.is_initial() {
                b.insert(format!("{};{}", k.id, fmt_set(k.neighbours)), send);
            } else {
                f.insert(format!("{};{};{}", k.id, fmt_set(k.neighbours), fmt_set(k.received)), send);
            }
        }
        TableRepr { universe: t.universe, d_max: t.d_max, b, f }
    }
}

fn parse_set(s: &str) -> Result<Vec<Id>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.trim().parse::<Id>().map_err(|e| format!("bad identifier {x:?}: {e}"))).collect()
}

impl TryFrom<TableRepr> for ProtocolTable {
    type Error = String;

    fn try_from(r: TableRepr) -> Result<ProtocolTable, String> {
        let mut t = ProtocolTable::empty(r.universe, r.d_max).map_err(|e| e.to_string())?;
        for (key, send) in r.b {
            let parts: Vec<&str> = key.split(';').collect();
            let [id, n] = parts[..] else { return Err(format!("bad b key {key:?}")) };
            let id: Id = id.parse().map_err(|_| format!("bad b key {key:?}"))?;
            t.set(Key::b(id, &parse_set(n)?), set_of(&send)).map_err(|e| e.to_string())?;
        }
        for (key, send) in r.f {
            let parts: Vec<&str> = key.split(';').collect();
            let [id, n, rec] = parts[..] else { return Err(format!("bad f key {key:?}")) };
            let id: Id = id.parse().map_err(|_| format!("bad f key {key:?}"))?;
            let rec = parse_set(rec)?;
            if rec.is_empty() {
                return Err(format!("f entry {key:?} has an empty received set"));
            }
            t.set(Key::f(id, &parse_set(n)?, &rec), set_of(&send)).map_err(|e| e.to_string())?;
        }
        Ok(t)
    }
}
