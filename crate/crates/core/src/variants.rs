//! Relaxed protocols: Parrot, 1-Bit, Neighbourhood-2 and Random Flooding.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::linear::Gf2Basis;
use crate::balance::{BalanceChecker, BalanceError};
use crate::engine::{self, ArcTable, Configuration, EngineError, Mask, Trace, TraceBuilder, VMask, VertexSet};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VariantError {
    #[error("unknown protocol {0:?}")]
    UnknownProtocol(String),
    #[error("random flooding needs a random source")]
    MissingRng,
    #[error("graph too large for the bitmask simulator")]
    TooLarge,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Af,
    Parrot,
    OneBit,
    Neighbourhood2,
    Random,
}

impl FromStr for Protocol {
    type Err = VariantError;
    fn from_str(s: &str) -> Result<Protocol, VariantError> {
        Ok(match s {
            "af" => Protocol::Af,
            "parrot" => Protocol::Parrot,
            "one_bit" => Protocol::OneBit,
            "neighbourhood2" => Protocol::Neighbourhood2,
            "random" => Protocol::Random,
            other => return Err(VariantError::UnknownProtocol(other.to_string())),
        })
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Af => "af",
            Protocol::Parrot => "parrot",
            Protocol::OneBit => "one_bit",
            Protocol::Neighbourhood2 => "neighbourhood2",
            Protocol::Random => "random",
        })
    }
}

/// `A_{G,I}(S)` plus every message bounced back by a leaf.
pub fn parrot_step(g: &Graph, s: &Configuration, i: &VertexSet) -> Result<Configuration, EngineError> {
    let mut out = engine::af_step(g, s, i)?;
    for &(u, v) in s {
        if g.degree(v) == 1 {
            out.insert((v, u));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomMode {
    /// One bit per round shared by every node.
    Shared,
    /// Independent bits per node and round.
    PerNode,
}

/// Seeded bit stream for Random Flooding.
#[derive(Clone, Debug)]
pub struct RandomSource {
    pub seed: u64,
    pub mode: RandomMode,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, mode: RandomMode) -> RandomSource {
        RandomSource { seed, mode, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Nodes (dense indices) holding a 1 bit this round.
    fn ones(&mut self, n: usize) -> VMask {
        match self.mode {
            RandomMode::Shared => {
                if self.rng.gen::<bool>() {
                    (1u128 << n) - 1
                } else {
                    0
                }
            }
            RandomMode::PerNode => (0..n).fold(0, |m, v| if self.rng.gen::<bool>() { m | 1 << v } else { m }),
        }
    }
}

/// Bitmask stepping for the deterministic variants.
#[derive(Clone, Debug)]
pub struct VariantTable {
    pub table: ArcTable,
    into_leaves: Mask,
    centres: VMask,
}

impl VariantTable {
    pub fn new(g: &Graph) -> Result<VariantTable, VariantError> {
        let table = ArcTable::new(g).ok_or(VariantError::TooLarge)?;
        let mut into_leaves = 0;
        let mut centres = 0;
        for (i, &v) in g.vertices().iter().enumerate() {
            if g.degree(v) == 1 {
                into_leaves |= table.in_mask(i);
            }
            let nb = g.neighbours(v);
            if nb.len() >= 2 && nb.iter().all(|&w| g.degree(w) == 1) {
                centres |= 1 << i;
            }
        }
        Ok(VariantTable { table, into_leaves, centres })
    }

    #[inline]
    pub fn af(&self, s: Mask) -> Mask {
        self.table.step(s, 0)
    }

    #[inline]
    pub fn parrot(&self, s: Mask) -> Mask {
        self.table.step(s, 0) | self.table.reverse(s & self.into_leaves)
    }

    #[inline]
    pub fn neighbourhood2(&self, s: Mask) -> Mask {
        let recv = self.table.receivers(s);
        (self.table.out_of(recv & !self.centres) & !self.table.reverse(s)) | self.table.out_of(recv & self.centres)
    }

    #[inline]
    fn random(&self, s: Mask, ones: VMask) -> Mask {
        let recv = self.table.receivers(s);
        (self.table.out_of(recv & !ones) & !self.table.reverse(s)) | self.table.out_of(recv & ones)
    }

    /// Exact quiescence of a deterministic variant by repeat detection.
    pub fn quiescence(&self, mut s: Mask, step: impl Fn(&Self, Mask) -> Mask) -> Option<usize> {
        let mut seen = HashSet::new();
        let mut j = 0;
        while s != 0 {
            if !seen.insert(s) {
                return None;
            }
            s = step(self, s);
            j += 1;
        }
        Some(j)
    }
}

/// Per-round stepping of one protocol from a fixed source.
pub struct Runner<'a> {
    vt: VariantTable,
    protocol: Protocol,
    leaf_source: bool,
    source: VMask,
    rng: Option<&'a mut RandomSource>,
}

impl<'a> Runner<'a> {
    pub fn new(protocol: Protocol, g: &Graph, source: Vertex, rng: Option<&'a mut RandomSource>) -> Result<Runner<'a>, VariantError> {
        if protocol == Protocol::Random && rng.is_none() {
            return Err(VariantError::MissingRng);
        }
        let mut vt = VariantTable::new(g)?;
        let src = vt.table.vmask_of([source])?;
        // on K_2 the initiator plays the centre
        if g.n() == 2 {
            vt.centres |= src;
        }
        Ok(Runner { vt, protocol, leaf_source: g.degree(source) == 1, source: src, rng })
    }

    pub fn table(&self) -> &ArcTable {
        &self.vt.table
    }

    /// Round 1: the initiator sends to every neighbour.
    pub fn first(&self) -> Mask {
        self.vt.table.out_of(self.source)
    }

    pub fn next(&mut self, s: Mask) -> Mask {
        let vt = &self.vt;
        match self.protocol {
            Protocol::Af => vt.af(s),
            Protocol::Parrot => vt.parrot(s),
            Protocol::OneBit if self.leaf_source => vt.af(s),
            Protocol::OneBit => vt.parrot(s),
            Protocol::Neighbourhood2 => vt.neighbourhood2(s),
            Protocol::Random => {
                let ones = self.rng.as_deref_mut().expect("checked in new").ones(vt.table.n());
                vt.random(s, ones)
            }
        }
    }

    /// Runs without materializing configurations.
    pub fn summary(&mut self, round_cap: usize) -> RunSummary {
        let t = &self.vt.table;
        let everyone: VMask = (1u128 << t.n()) - 1;
        let mut informed = self.source;
        let mut broadcast_round = (informed == everyone).then_some(1);
        let mut s = self.first();
        for r in 1..=round_cap {
            if s == 0 {
                return RunSummary { broadcast_round, terminated_at: Some(r) };
            }
            informed |= self.vt.table.receivers(s);
            if broadcast_round.is_none() && informed == everyone {
                broadcast_round = Some(r);
            }
            s = self.next(s);
        }
        RunSummary { broadcast_round, terminated_at: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    /// First round by which every vertex is informed.
    pub broadcast_round: Option<usize>,
    /// First round with no message in flight, if within the cap.
    pub terminated_at: Option<usize>,
}

/// Runs one of the protocols from a single source for at most `round_cap` rounds.
pub fn run_variant(
    protocol: Protocol,
    g: &Graph,
    source: Vertex,
    rng: Option<&mut RandomSource>,
    round_cap: usize,
) -> Result<Trace, VariantError> {
    let mut run = Runner::new(protocol, g, source, rng)?;
    let mut b = TraceBuilder::new(g, engine::single(source));
    let mut s = run.first();
    for _ in 1..=round_cap {
        if b.push(run.table().config_of(s)) {
            break;
        }
        s = run.next(s);
    }
    Ok(b.finish())
}

/// A walk between two leaves that never immediately backtracks, except for
/// the three-vertex walk `l w l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeafPath {
    pub walk: Vec<Vertex>,
    /// Path representation: the `j`-th visit of `v` becomes `(v, j)`.
    pub rep: Vec<(Vertex, usize)>,
}

impl LeafPath {
    fn new(walk: Vec<Vertex>) -> LeafPath {
        let mut count = std::collections::BTreeMap::new();
        let rep = walk
            .iter()
            .map(|&v| {
                let c = count.entry(v).or_insert(0usize);
                *c += 1;
                (v, *c)
            })
            .collect();
        LeafPath { walk, rep }
    }

    pub fn steps(&self) -> usize {
        self.walk.len().saturating_sub(1)
    }

    /// Head positions of `s` on the path representation: each message lies
    /// on the representation edges joining consecutive copies of its ends.
    pub fn heads(&self, s: &Configuration) -> Vec<usize> {
        let mut h = Vec::new();
        for i in 0..self.steps() {
            let (a, b) = (self.walk[i], self.walk[i + 1]);
            if s.contains(&(a, b)) {
                h.push(i);
            }
            if s.contains(&(b, a)) {
                h.push(i + 1);
            }
        }
        h
    }

    /// Every message has an even number of messages (itself included) whose
    /// heads lie an even distance from its own.
    pub fn p_balanced(&self, s: &Configuration) -> bool {
        let h = self.heads(s);
        h.iter().all(|&x| h.iter().filter(|&&y| (x + y) % 2 == 0).count() % 2 == 0)
    }
}

/// All leaf paths with at most `max_len` steps. A walk and its reversal are
/// reported once (the lexicographically smaller one).
pub fn enumerate_leaf_paths(g: &Graph, max_len: usize) -> Vec<LeafPath> {
    let mut out = BTreeSet::new();
    for l in g.leaves() {
        let mut walk = vec![l];
        leaf_walks(g, max_len, &mut walk, &mut out);
    }
    out.into_iter().map(LeafPath::new).collect()
}

fn leaf_walks(g: &Graph, max_len: usize, walk: &mut Vec<Vertex>, out: &mut BTreeSet<Vec<Vertex>>) {
    let cur = *walk.last().unwrap();
    if walk.len() >= 2 && g.degree(cur) == 1 {
        let rev: Vec<Vertex> = walk.iter().rev().copied().collect();
        out.insert(walk.clone().min(rev));
        return;
    }
    if walk.len() > max_len {
        return;
    }
    for w in g.neighbours(cur) {
        if walk.len() >= 2 && w == walk[walk.len() - 2] {
            if walk.len() == 2 && g.degree(w) == 1 {
                out.insert(vec![w, cur, w]);
            }
            continue;
        }
        walk.push(w);
        leaf_walks(g, max_len, walk, out);
        walk.pop();
    }
}

/// Literal P-balance over leaf paths of at most `max_len` steps.
pub fn is_p_balanced_bounded(g: &Graph, s: &Configuration, max_len: usize) -> Result<bool, VariantError> {
    let bc = BalanceChecker::new(g)?;
    if !bc.check(s)?.balanced {
        return Ok(false);
    }
    Ok(enumerate_leaf_paths(g, max_len).iter().all(|l| l.p_balanced(s)))
}

/// P-balance decided through parity functionals.
///
/// On a leaf path the condition says: the number of messages whose head sits
/// at an even position is even, and likewise for odd positions. Each count is
/// a GF(2) functional of the configuration, so P-balance on every leaf path
/// (of any length) is the vanishing of the span of all of them. The span is
/// computed as a fixpoint of affine hulls over walk states `(vertex,
/// previous vertex, position parity)`.
#[derive(Clone, Debug)]
pub struct PBalanceChecker {
    pub balance: BalanceChecker,
    parity: Gf2Basis,
}

impl PBalanceChecker {
    pub fn new(g: &Graph) -> Result<PBalanceChecker, VariantError> {
        let balance = BalanceChecker::new(g)?;
        let t = &balance.table;
        if t.arc_count() > 64 {
            return Err(VariantError::TooLarge);
        }
        let n = g.n();
        let leaf: Vec<bool> = g.vertices().iter().map(|&v| g.degree(v) == 1).collect();
        let nbrs: Vec<Vec<usize>> = (0..n).map(|i| g.nbr_idx(i).to_vec()).collect();
        let arc = |a: usize, b: usize| t.arc_index((g.id(a), g.id(b))).unwrap();
        // channel p occupies bits [64p, 64p + 64)
        let contrib = |cur: usize, w: usize, p: usize| -> Mask { (1u128 << (arc(cur, w) + 64 * p)) | (1u128 << (arc(w, cur) + 64 * (1 - p))) };
        let state = |cur: usize, prev: usize, p: usize| (cur * n + prev) * 2 + p;
        let mut base: Vec<Option<Mask>> = vec![None; n * n * 2];
        let mut diffs: Vec<Gf2Basis> = vec![Gf2Basis::new(); n * n * 2];
        let mut terminal = Gf2Basis::new();
        let mut work: Vec<(usize, usize, usize, Mask)> = Vec::new();
        for l in 0..n {
            if leaf[l] {
                let w = nbrs[l][0];
                let c = contrib(l, w, 0);
                if leaf[w] {
                    terminal.insert(c);
                } else {
                    work.push((w, l, 1, c));
                }
            }
        }
        while let Some((cur, prev, p, point)) = work.pop() {
            let st = state(cur, prev, p);
            let fresh = match base[st] {
                None => {
                    base[st] = Some(point);
                    true
                }
                Some(b0) => diffs[st].insert(point ^ b0),
            };
            if !fresh {
                continue;
            }
            for &w in &nbrs[cur] {
                let next = point ^ contrib(cur, w, p);
                if w == prev {
                    // only the three-vertex walk l w l may turn back
                    if leaf[prev] {
                        terminal.insert(next);
                    }
                    continue;
                }
                if leaf[w] {
                    terminal.insert(next);
                } else {
                    work.push((w, cur, 1 - p, next));
                }
            }
        }
        let mut parity = Gf2Basis::new();
        let low: Mask = u64::MAX as Mask;
        for &r in terminal.rows() {
            parity.insert(r & low);
            parity.insert(r >> 64);
        }
        Ok(PBalanceChecker { balance, parity })
    }

    pub fn parity_rank(&self) -> usize {
        self.parity.rank()
    }

    #[inline]
    pub fn p_balanced_mask(&self, s: Mask) -> bool {
        self.parity.annihilates(s) && self.balance.balanced_mask(s)
    }

    pub fn check(&self, s: &Configuration) -> Result<bool, VariantError> {
        Ok(self.p_balanced_mask(self.balance.table.mask_of(s)?))
    }
}

/// P-balance on `g` (balance plus the leaf-path parity condition).
pub fn is_p_balanced(g: &Graph, s: &Configuration) -> Result<bool, VariantError> {
    PBalanceChecker::new(g)?.check(s)
}

/// Documented simulation cap for Parrot Flooding: `2|E| * (1 + 2|E|)`, the
/// leaf-path length bound `2|E|` standing in for the longest leaf path.
pub fn parrot_cap(g: &Graph) -> usize {
    2 * g.m() * (1 + 2 * g.m())
}

/// Documented cap for Random Flooding runs: `10 (D + 1) 64` rounds with a
/// shared bit. Independent per-node bits absorb far more slowly on dense
/// graphs, so that mode gets `2^(c + 1)` times as long, `c = |E| - |V| + 1`
/// being the number of independent cycles (capped at `2^40`).
pub fn random_cap(g: &Graph, mode: RandomMode) -> usize {
    let base = 10 * (g.diameter() + 1) * 64;
    match mode {
        RandomMode::Shared => base,
        RandomMode::PerNode => base << (g.m() + 2 - g.n()).min(40),
    }
}

/// Set-based Parrot iteration from `s`, for cross-checking the bitmask path.
pub fn parrot_quiesces_within(g: &Graph, s: &Configuration, cap: usize) -> Result<Option<usize>, EngineError> {
    let none = VertexSet::new();
    let mut cur = s.clone();
    for j in 0..=cap {
        if cur.is_empty() {
            return Ok(Some(j));
        }
        cur = parrot_step(g, &cur, &none)?;
    }
    Ok(None)
}
