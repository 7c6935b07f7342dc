//! Exhaustive search over tables, expanding only the entries a suite reads.
//!
//! A branch fixes table entries in the order the suite's runs first consult
//! them. As soon as some run fails the branch is cut; a branch whose runs
//! all broadcast and quiesce is a survivor, with every entry the suite never
//! read left unassigned.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sim::{Compiled, LabelledCase, Labelling};
use super::digraph::{necessary_conditions, BehaviourDigraph, Violation, FORBIDDEN_ARCS, FORBIDDEN_VERTICES};
use super::table::{af_table, ids, set_of, Id, IdSet, Key, ProtocolTable};
use super::ProtoError;
use crate::graph::{Gadget, Graph, Vertex};

/// What to search: a suite, entries fixed in advance, and which
/// identifiers may deviate from flooding.
#[derive(Clone, Debug)]
pub struct SearchProfile {
    pub name: String,
    pub universe: u8,
    pub d_max: u8,
    pub suite: Vec<LabelledCase>,
    pub pinned: Vec<(Key, IdSet)>,
    /// Identifiers whose entries are searched; everybody else floods.
    pub free: IdSet,
    /// Renaming identifiers maps the suite onto itself and fixes the pins.
    pub symmetric: bool,
    /// Search blocks independently; off, everything after the core is one
    /// joint search.
    pub factor: bool,
}

/// Every injective labelling of `g` from `0..universe`, one per distinct
/// labelled edge set.
pub fn labellings(g: &Graph, universe: u8) -> Vec<Labelling> {
    let vs = g.vertices().to_vec();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut current: Vec<Id> = Vec::new();
    fn rec(g: &Graph, vs: &[Vertex], universe: u8, cur: &mut Vec<Id>, seen: &mut BTreeSet<Vec<(Id, Id)>>, out: &mut Vec<Labelling>) {
        if cur.len() == vs.len() {
            let lab: Labelling = vs.iter().copied().zip(cur.iter().copied()).collect();
            let mut key: Vec<(Id, Id)> = g
                .edges()
                .into_iter()
                .map(|(a, b)| {
                    let (x, y) = (lab[&a], lab[&b]);
                    (x.min(y), x.max(y))
                })
                .collect();
            key.sort_unstable();
            if seen.insert(key) {
                out.push(lab);
            }
            return;
        }
        for l in 0..universe {
            if !cur.contains(&l) {
                cur.push(l);
                rec(g, vs, universe, cur, seen, out);
                cur.pop();
            }
        }
    }
    rec(g, &vs, universe, &mut current, &mut seen, &mut out);
    out
}

/// Every labelling of every graph, from every source.
pub fn labelled_suite(graphs: &[Graph], universe: u8) -> Vec<LabelledCase> {
    let mut out = Vec::new();
    for g in graphs {
        for lab in labellings(g, universe) {
            for &s in g.vertices() {
                out.push(LabelledCase { graph: g.clone(), labelling: lab.clone(), source: s });
            }
        }
    }
    out
}

fn path(n: usize) -> Graph {
    Gadget::Path { n }.build().expect("path")
}

fn cycle(n: usize) -> Graph {
    Gadget::Cycle { n }.build().expect("cycle")
}

/// Identity labelling of a path on `ids`, vertex `i` carrying `ids[i]`.
fn labelled_path(ids: &[Id]) -> (Graph, Labelling) {
    let g = path(ids.len());
    let lab = ids.iter().enumerate().map(|(i, &l)| (i as Vertex, l)).collect();
    (g, lab)
}

fn all_sources(g: &Graph, lab: &Labelling) -> Vec<LabelledCase> {
    g.vertices().iter().map(|&s| LabelledCase { graph: g.clone(), labelling: lab.clone(), source: s }).collect()
}

/// The six-vertex path as `0..6`, and with either end of each half turned.
pub const SIX_PATH_LAYOUTS: [[Id; 6]; 4] = [[0, 1, 2, 3, 4, 5], [2, 1, 0, 3, 4, 5], [0, 1, 2, 5, 4, 3], [2, 1, 0, 5, 4, 3]];

/// Each layout and all its subpaths, from every source.
fn six_path_suite(layouts: &[[Id; 6]]) -> Vec<LabelledCase> {
    let mut suite = Vec::new();
    let mut seen = BTreeSet::new();
    for ids in layouts {
        for len in 2..=6 {
            for start in 0..=6 - len {
                let part = &ids[start..start + len];
                let mut key = part.to_vec();
                if key.first() > key.last() {
                    key.reverse();
                }
                if seen.insert(key) {
                    let (g, lab) = labelled_path(part);
                    suite.extend(all_sources(&g, &lab));
                }
            }
        }
    }
    suite
}

impl SearchProfile {
    /// Every labelled path on up to six vertices from six identifiers.
    pub fn all_paths(universe: u8) -> SearchProfile {
        let graphs: Vec<Graph> = (2..=universe as usize).map(path).collect();
        SearchProfile::with_suite(&format!("all_paths:{universe}"), universe, 2, labelled_suite(&graphs, universe))
    }

    /// The six-vertex path in all four layouts with their subpaths, nothing
    /// pinned.
    pub fn six_path() -> SearchProfile {
        SearchProfile {
            name: "six_path".into(),
            universe: 6,
            d_max: 2,
            suite: six_path_suite(&SIX_PATH_LAYOUTS),
            pinned: Vec::new(),
            free: 0b111111,
            symmetric: false,
            factor: true,
        }
    }

    fn with_suite(name: &str, universe: u8, d_max: u8, suite: Vec<LabelledCase>) -> SearchProfile {
        SearchProfile {
            name: name.into(),
            universe,
            d_max,
            suite,
            pinned: Vec::new(),
            free: ((1u16 << universe) - 1) as u8,
            symmetric: true,
            factor: true,
        }
    }

    /// All labelled paths and cycles on at most `universe` vertices whose
    /// degrees fit `d_max`, from every source.
    pub fn low_degree(universe: u8, d_max: u8) -> SearchProfile {
        let mut graphs = vec![path(2)];
        if d_max >= 2 {
            for n in 3..=universe as usize {
                graphs.push(path(n));
                graphs.push(cycle(n));
            }
        }
        let suite = labelled_suite(&graphs, universe);
        SearchProfile::with_suite(&format!("low_degree:{universe},{d_max}"), universe, d_max, suite)
    }

    /// The small path and cycle gadgets: the two- and three-vertex paths and
    /// the triangle, plus the six-vertex path once there are six identifiers.
    pub fn gadgets(universe: u8) -> SearchProfile {
        let mut graphs = vec![path(2), path(3), cycle(3)];
        if universe >= 6 {
            graphs.push(path(6));
        }
        let suite = labelled_suite(&graphs, universe);
        SearchProfile::with_suite(&format!("gadgets:{universe}"), universe, 2, suite)
    }

    /// Every labelling of the three-vertex path plus the two-vertex path.
    pub fn three_path() -> SearchProfile {
        let suite = labelled_suite(&[path(2), path(3)], 3);
        SearchProfile::with_suite("three_path", 3, 2, suite)
    }

    /// Two identifiers on a single edge.
    pub fn single_edge() -> SearchProfile {
        SearchProfile::with_suite("single_edge", 2, 1, labelled_suite(&[path(2)], 2))
    }

    /// The six-vertex path labelled `0..6` and each of its subpaths, with
    /// leaves 0 and 2 echoing towards 1 and leaves 3 and 5 echoing towards
    /// 4. With `oriented`, 1 also answers a message from 0 by sending to
    /// both sides, and 4 does the same for a message from 5. Without it the
    /// path is also laid out with 0 and 2 swapped, 3 and 5 swapped, or both,
    /// since either end of a triple may face outwards.
    pub fn facing_triples(oriented: bool) -> SearchProfile {
        let layouts: &[[Id; 6]] = if oriented { &SIX_PATH_LAYOUTS[..1] } else { &SIX_PATH_LAYOUTS };
        let suite = six_path_suite(layouts);
        let mut pinned = vec![
            (Key::f(0, &[1], &[1]), 1 << 1),
            (Key::f(2, &[1], &[1]), 1 << 1),
            (Key::f(3, &[4], &[4]), 1 << 4),
            (Key::f(5, &[4], &[4]), 1 << 4),
        ];
        if oriented {
            pinned.push((Key::f(1, &[0, 2], &[0]), 0b101));
            pinned.push((Key::f(4, &[3, 5], &[5]), 0b101000));
        }
        let name = if oriented { "facing_triples" } else { "facing_echoes" };
        SearchProfile { name: name.into(), universe: 6, d_max: 2, suite, pinned, free: 0b111111, symmetric: false, factor: true }
    }

    /// The triangle with a two-vertex tail, labelled every way from `0..5`
    /// that keeps the identifiers in `free` off the degree-3 vertex, and the
    /// labelled paths on up to five vertices. Only identifiers in `free` may
    /// deviate from flooding.
    pub fn extended_paw(free: IdSet) -> SearchProfile {
        let paw = Gadget::ExtendedPaw { tail: 2 }.build().expect("extended paw");
        let hub = paw.vertices().iter().copied().find(|&v| paw.degree(v) == 3).expect("degree-3 vertex");
        let mut suite: Vec<LabelledCase> = labelled_suite(&[paw], 5)
            .into_iter()
            .filter(|c| free >> c.labelling[&hub] & 1 == 0)
            .collect();
        suite.extend(labelled_suite(&(2..=5).map(path).collect::<Vec<_>>(), 5));
        SearchProfile {
            name: format!("extended_paw:{}", ids(free).map(|i| i.to_string()).collect::<Vec<_>>().join(",")),
            universe: 5,
            d_max: 3,
            suite,
            pinned: Vec::new(),
            free,
            symmetric: false,
            factor: true,
        }
    }
}

/// log2 of the number of total tables over the searched entries.
pub fn table_space_log2(profile: &SearchProfile) -> Result<u64, ProtoError> {
    let t = ProtocolTable::empty(profile.universe, profile.d_max)?;
    Ok(t.domain().iter().filter(|k| profile.free >> k.id & 1 == 1).map(|k| k.neighbours.count_ones() as u64).sum())
}

/// Survivors sharing one assignment of the entries that several blocks read.
/// A survivor is `core` plus one alternative from every block; blocks fix
/// disjoint entries, so every combination survives.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurvivorClass {
    pub core: ProtocolTable,
    /// Number of cores related to this one by renaming identifiers,
    /// itself included. Each has the same number of completions.
    pub orbit: u64,
    /// Per block, the entries it adds on top of `core`.
    pub blocks: Vec<Vec<ProtocolTable>>,
}

impl SurvivorClass {
    pub fn completions(&self) -> u128 {
        self.blocks.iter().map(|b| b.len() as u128).product()
    }

    /// `core` with one alternative merged in, per block and alternative.
    pub fn local_tables(&self) -> impl Iterator<Item = ProtocolTable> + '_ {
        self.blocks.iter().flatten().map(|local| merged(&self.core, local))
    }

    /// Every survivor of the class; the product can be large.
    pub fn survivors(&self) -> Vec<ProtocolTable> {
        let mut out = vec![self.core.clone()];
        for b in &self.blocks {
            out = out.iter().flat_map(|t| b.iter().map(move |local| merged(t, local))).collect();
        }
        out
    }
}

fn merged(base: &ProtocolTable, extra: &ProtocolTable) -> ProtocolTable {
    let mut t = base.clone();
    for (k, v) in extra.assigned() {
        t.set_unchecked(k, v);
    }
    t
}

/// An identifier together with its neighbour identifiers: the position a
/// table entry is read at, whatever was received.
pub type Situation = (Id, IdSet);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockInfo {
    /// Identifiers appearing in the block's runs.
    pub ids: Vec<Id>,
    /// Searched positions only this block reads, as `(id, neighbours)`.
    pub positions: Vec<(Id, Vec<Id>)>,
    pub runs: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub profile: String,
    pub universe: u8,
    pub d_max: u8,
    pub suite_size: usize,
    /// Independent parts of the suite, searched separately per core.
    pub blocks: Vec<BlockInfo>,
    /// Runs that failed and cut a branch.
    pub pruned: u64,
    /// One class per renaming orbit of cores in symmetric profiles, one per
    /// core otherwise.
    pub classes: Vec<SurvivorClass>,
    pub survivor_count: u128,
}

impl SearchReport {
    /// Survivors of the representative classes.
    pub fn representative_survivors(&self) -> Vec<ProtocolTable> {
        self.classes.iter().flat_map(|c| c.survivors()).collect()
    }

    /// Tables `core + one block alternative` over all classes. A predicate
    /// whose every instance reads entries of a single block holds on all
    /// survivors iff it holds on all of these.
    pub fn local_tables(&self) -> impl Iterator<Item = ProtocolTable> + '_ {
        self.classes.iter().flat_map(|c| c.local_tables())
    }

    /// Broken necessary conditions over every survivor. Each condition
    /// instance reads at most three positions; it is judged on the core
    /// plus every combination of alternatives of the blocks owning those
    /// positions, which covers every survivor.
    pub fn necessary_violations(&self) -> Vec<Violation> {
        let owner: BTreeMap<Situation, usize> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, info)| info.positions.iter().map(move |(id, n)| ((*id, set_of(n)), b)))
            .collect();
        let d_max = self.classes.first().map_or(2, |c| c.core.d_max());
        let mut instances: Vec<Vec<Situation>> = Vec::new();
        let k = self.universe;
        for u in 0..k {
            for n in 1..=((1u16 << k) - 1) as u8 {
                if n >> u & 1 == 0 && n.count_ones() <= d_max as u32 {
                    instances.push(vec![(u, n)]);
                }
            }
            for v in (0..k).filter(|&v| v != u) {
                instances.push(vec![(u, 1 << v), (v, 1 << u)]);
                if d_max >= 2 {
                    for w in (u + 1..k).filter(|&w| w != v) {
                        instances.push(vec![(u, 1 << v), (w, 1 << v), (v, (1 << u) | (1 << w))]);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        for c in &self.classes {
            let joint = c.blocks.len() == 1 && self.blocks.len() != 1;
            for inst in &instances {
                let involved: BTreeSet<usize> =
                    if joint { BTreeSet::from([0]) } else { inst.iter().filter_map(|s| owner.get(s).copied()).collect() };
                let mut tables = vec![c.core.clone()];
                for &b in &involved {
                    let projections: BTreeSet<Vec<(Key, IdSet)>> = c.blocks[b]
                        .iter()
                        .map(|alt| alt.assigned().filter(|(k, _)| inst.contains(&(k.id, k.neighbours))).collect())
                        .collect();
                    tables = tables
                        .iter()
                        .flat_map(|t| {
                            projections.iter().map(move |p| {
                                let mut t = t.clone();
                                for &(k, v) in p {
                                    t.set_unchecked(k, v);
                                }
                                t
                            })
                        })
                        .collect();
                }
                for t in &tables {
                    for v in necessary_conditions(t) {
                        if inst.contains(&(v.key.id, v.key.neighbours)) {
                            out.insert(v);
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Survivors agreeing with flooding on every entry they fix.
    pub fn flooding_count(&self) -> u128 {
        self.classes
            .iter()
            .map(|c| {
                if !deviations(&c.core).is_empty() {
                    return 0;
                }
                let per: u128 = c.blocks.iter().map(|b| b.iter().filter(|t| deviations(t).is_empty()).count() as u128).product();
                per * c.orbit as u128
            })
            .sum()
    }

    /// Smallest identifier sets meeting every deviation from flooding, with
    /// the number of survivors needing each. Sets are reported for the
    /// representative classes and weighted by orbit size.
    pub fn exception_sets(&self) -> BTreeMap<Vec<Id>, u128> {
        let mut out: BTreeMap<Vec<Id>, u128> = BTreeMap::new();
        for c in &self.classes {
            let core: BTreeSet<IdSet> = deviations(&c.core).iter().map(|(k, _)| k.support()).collect();
            let mut families: BTreeMap<BTreeSet<IdSet>, u128> = BTreeMap::from([(core, 1)]);
            for b in &c.blocks {
                let mut local: BTreeMap<BTreeSet<IdSet>, u128> = BTreeMap::new();
                for t in b {
                    *local.entry(deviations(t).iter().map(|(k, _)| k.support()).collect()).or_default() += 1;
                }
                let mut next = BTreeMap::new();
                for (f, n) in &families {
                    for (g, m) in &local {
                        *next.entry(f.union(g).copied().collect::<BTreeSet<_>>()).or_default() += n * m;
                    }
                }
                families = next;
            }
            for (f, n) in families {
                let x = hitting_set(self.universe, &f);
                *out.entry(ids(x).collect()).or_default() += n * c.orbit as u128;
            }
        }
        out
    }
}

/// Lexicographically first among the smallest sets meeting every member.
fn hitting_set(universe: u8, family: &BTreeSet<IdSet>) -> IdSet {
    let full = ((1u16 << universe) - 1) as u8;
    let mut sets: Vec<IdSet> = (0..=full).collect();
    sets.sort_by_key(|s| (s.count_ones(), ids(*s).collect::<Vec<_>>()));
    sets.into_iter().find(|&x| family.iter().all(|&s| s & x != 0)).unwrap_or(full)
}

/// Survivor count by one plain search without blocks or renaming.
pub fn count_survivors(profile: &SearchProfile) -> Result<u128, ProtoError> {
    let base = base_table(profile)?;
    let cases: Vec<Compiled> = profile.suite.iter().map(|c| Compiled::new(&base, c)).collect::<Result<_, _>>()?;
    let refs: Vec<&Compiled> = cases.iter().collect();
    fn count(cases: &[&Compiled], t: &mut ProtocolTable, from: usize) -> u128 {
        let mut i = from;
        while i < cases.len() {
            let c = cases[i];
            match c.run(t, None, |_| {}) {
                Ok(res) if res.good(c) => i += 1,
                Ok(_) => return 0,
                Err(k) => {
                    let mut n = 0;
                    for v in options(k) {
                        t.set_unchecked(k, v);
                        n += count(cases, t, i);
                    }
                    t.unset(k);
                    return n;
                }
            }
        }
        1
    }
    Ok(count(&refs, &mut base.clone(), 0))
}

fn base_table(profile: &SearchProfile) -> Result<ProtocolTable, ProtoError> {
    let af = af_table(profile.universe, profile.d_max)?;
    let mut base = ProtocolTable::empty(profile.universe, profile.d_max)?;
    for k in base.domain() {
        if profile.free >> k.id & 1 == 0 {
            base.set_unchecked(k, af.get_unchecked(k));
        }
    }
    for &(k, v) in &profile.pinned {
        base.set(k, v)?;
    }
    Ok(base)
}

fn options(k: Key) -> Vec<IdSet> {
    let n = k.neighbours;
    let mut out = Vec::new();
    let mut v = n;
    loop {
        out.push(v);
        if v == 0 {
            break;
        }
        v = (v - 1) & n;
    }
    out
}

/// Lazy depth-first search over the entries `cases` consult.
fn dfs(cases: &[&Compiled], t: &mut ProtocolTable, from: usize, out: &mut Vec<ProtocolTable>, pruned: &mut u64) {
    let mut i = from;
    while i < cases.len() {
        let c = cases[i];
        match c.run(t, None, |_| {}) {
            Ok(res) if res.good(c) => i += 1,
            Ok(_) => {
                *pruned += 1;
                return;
            }
            Err(k) => {
                for v in options(k) {
                    t.set_unchecked(k, v);
                    dfs(cases, t, i, out, pruned);
                }
                t.unset(k);
                return;
            }
        }
    }
    out.push(t.clone());
}

fn permutations(k: u8) -> Vec<Vec<Id>> {
    let mut out = Vec::new();
    let mut cur: Vec<Id> = Vec::new();
    fn rec(k: u8, cur: &mut Vec<Id>, out: &mut Vec<Vec<Id>>) {
        if cur.len() == k as usize {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !cur.contains(&i) {
                cur.push(i);
                rec(k, cur, out);
                cur.pop();
            }
        }
    }
    rec(k, &mut cur, &mut out);
    out
}

/// Largest universe and degree bound the search accepts.
pub const SEARCH_UNIVERSE_LIMIT: u8 = 6;
pub const SEARCH_DEGREE_LIMIT: u8 = 3;

fn table_key(t: &ProtocolTable) -> String {
    serde_json::to_string(t).expect("table json")
}

fn only_new(t: &ProtocolTable, base: &ProtocolTable) -> ProtocolTable {
    let mut out = ProtocolTable::empty(t.universe(), t.d_max()).expect("same shape");
    for (k, v) in t.assigned() {
        if base.get(k).is_none() {
            out.set_unchecked(k, v);
        }
    }
    out
}

/// Every table, restricted to the entries the suite exercises, under which
/// each suite run informs all vertices and reaches `∅`. Non-termination is
/// decided exactly by repeated configurations.
///
/// A run only reads entries whose identifiers all occur in its labelling.
/// Runs are grouped into blocks by maximal labelling identifier sets; runs
/// inside several blocks form the core, searched first. Each core is then
/// completed block by block. If a block ever fixes an entry another block
/// could read, that core is completed by one joint search instead.
pub fn exhaustive_search(profile: &SearchProfile) -> Result<SearchReport, ProtoError> {
    if profile.universe > SEARCH_UNIVERSE_LIMIT || profile.d_max > SEARCH_DEGREE_LIMIT {
        return Err(ProtoError::TooLarge { log2_tables: table_space_log2(profile).unwrap_or(u64::MAX) });
    }
    let base = base_table(profile)?;
    let cases: Vec<Compiled> = profile.suite.iter().map(|c| Compiled::new(&base, c)).collect::<Result<_, _>>()?;
    let idset = |c: &Compiled| c.labels.iter().fold(0u8, |m, &l| m | 1 << l);
    let mut maximal: Vec<IdSet> = cases.iter().map(idset).collect::<BTreeSet<_>>().into_iter().collect();
    let all = maximal.clone();
    maximal.retain(|&s| !all.iter().any(|&o| o != s && s & !o == 0));
    let within = |s: IdSet| maximal.iter().filter(|&&m| s & !m == 0).count();
    let sits: Vec<BTreeSet<Situation>> = cases
        .iter()
        .map(|c| (0..c.n).filter(|&i| profile.free >> c.labels[i] & 1 == 1).map(|i| (c.labels[i], c.nmask[i])).collect())
        .collect();
    // Core: runs lying in several maximal labelling sets, closed under
    // "reads nothing outside the core".
    let mut in_core: Vec<bool> = cases.iter().map(|c| within(idset(c)) > 1).collect();
    let core_sits: BTreeSet<Situation> = loop {
        let core_sits: BTreeSet<Situation> = (0..cases.len()).filter(|&i| in_core[i]).flat_map(|i| sits[i].iter().copied()).collect();
        let mut grew = false;
        for i in 0..cases.len() {
            if !in_core[i] && sits[i].is_subset(&core_sits) {
                in_core[i] = true;
                grew = true;
            }
        }
        if !grew {
            break core_sits;
        }
    };
    // Blocks: the remaining runs, joined whenever they share a position.
    let mut parent: Vec<usize> = (0..cases.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut owner: BTreeMap<Situation, usize> = BTreeMap::new();
    for i in (0..cases.len()).filter(|&i| !in_core[i]) {
        for s in sits[i].difference(&core_sits) {
            match owner.get(s) {
                Some(&j) => {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                None => {
                    owner.insert(*s, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in (0..cases.len()).filter(|&i| !in_core[i]) {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let core_cases: Vec<&Compiled> = (0..cases.len()).filter(|&i| in_core[i]).map(|i| &cases[i]).collect();
    let block_cases: Vec<Vec<&Compiled>> = groups.values().map(|g| g.iter().map(|&i| &cases[i]).collect()).collect();
    let block_sits: Vec<BTreeSet<Situation>> =
        groups.values().map(|g| g.iter().flat_map(|&i| sits[i].difference(&core_sits).copied().collect::<Vec<_>>()).collect()).collect();
    let blocks_info: Vec<BlockInfo> = groups
        .values()
        .zip(&block_sits)
        .map(|(g, bs)| BlockInfo {
            ids: ids(g.iter().fold(0, |m, &i| m | idset(&cases[i]))).collect(),
            positions: bs.iter().map(|&(id, n)| (id, ids(n).collect())).collect(),
            runs: g.len(),
        })
        .collect();

    let mut pruned = 0;
    let mut cores = Vec::new();
    dfs(&core_cases, &mut base.clone(), 0, &mut cores, &mut pruned);

    let mut grouped: Vec<(ProtocolTable, u64)> = Vec::new();
    if profile.symmetric && block_cases.len() > 1 {
        let perms = permutations(profile.universe);
        let mut orbits: BTreeMap<String, (ProtocolTable, u64)> = BTreeMap::new();
        for c in cores {
            let canon = perms.iter().map(|p| table_key(&c.permuted(p))).min().expect("identity");
            let e = orbits.entry(canon).or_insert_with(|| (c.clone(), 0));
            e.1 += 1;
        }
        grouped.extend(orbits.into_values());
    } else {
        grouped.extend(cores.into_iter().map(|c| (c, 1)));
    }

    let foreign = |b: usize, k: &Key| !block_sits[b].contains(&(k.id, k.neighbours));
    let results: Vec<(Option<SurvivorClass>, u64)> = grouped
        .into_par_iter()
        .map(|(core, orbit)| {
            let mut pruned = 0;
            let mut blocks = Vec::new();
            let mut factored = true;
            for (b, bc) in block_cases.iter().enumerate().filter(|_| profile.factor) {
                let mut found = Vec::new();
                dfs(bc, &mut core.clone(), 0, &mut found, &mut pruned);
                let local: Vec<ProtocolTable> = found.iter().map(|t| only_new(t, &core)).collect();
                if local.iter().any(|t| t.assigned().any(|(k, _)| foreign(b, &k))) {
                    factored = false;
                    break;
                }
                if local.is_empty() {
                    return (None, pruned);
                }
                blocks.push(local);
            }
            if !factored || !profile.factor {
                let joint: Vec<&Compiled> = block_cases.iter().flatten().copied().collect();
                let mut found = Vec::new();
                dfs(&joint, &mut core.clone(), 0, &mut found, &mut pruned);
                if found.is_empty() {
                    return (None, pruned);
                }
                blocks = vec![found.iter().map(|t| only_new(t, &core)).collect()];
            }
            (Some(SurvivorClass { core, orbit, blocks }), pruned)
        })
        .collect();
    let mut classes = Vec::new();
    for (c, p) in results {
        pruned += p;
        classes.extend(c);
    }
    classes.sort_by_cached_key(|c| table_key(&c.core));
    let survivor_count = classes.iter().map(|c| c.completions() * c.orbit as u128).sum();
    Ok(SearchReport {
        profile: profile.name.clone(),
        universe: profile.universe,
        d_max: profile.d_max,
        suite_size: profile.suite.len(),
        blocks: blocks_info,
        pruned,
        classes,
        survivor_count,
    })
}

/// Entries on which `t` differs from flooding.
pub fn deviations(t: &ProtocolTable) -> Vec<(Key, IdSet)> {
    t.assigned().filter(|&(k, v)| v != k.neighbours & !k.received).collect()
}

/// Identifiers owning at least one deviating entry.
pub fn deviating_ids(t: &ProtocolTable) -> IdSet {
    deviations(t).iter().fold(0, |m, (k, _)| m | 1 << k.id)
}

/// A smallest identifier set meeting every deviating entry, where an entry
/// involves its owner and the owner's neighbours. Ties go to the
/// lexicographically first set.
pub fn minimal_exceptions(t: &ProtocolTable) -> IdSet {
    hitting_set(t.universe(), &deviations(t).iter().map(|(k, _)| k.support()).collect())
}

/// One placement of the forbidden pattern and how many survivors realise it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternPlacement {
    /// Identifiers playing `u, v, w, x, y, z` in `u -> v <- w`, `x -> y <- z`.
    pub placement: Vec<Id>,
    pub survivors: u128,
}

/// Searches the profile once per placement of the forbidden pattern on
/// arcs the suite can exercise, with the four echoes pinned. Placements
/// related by the pattern's own symmetries, or by renaming identifiers in a
/// symmetric profile, are tried once. Runs of the six-vertex path laid out
/// around the placement are searched on their own first.
pub fn forbidden_pattern_search(profile: &SearchProfile) -> Result<Vec<PatternPlacement>, ProtoError> {
    let mut possible = BTreeSet::new();
    for case in &profile.suite {
        let g = &case.graph;
        for &v in g.vertices() {
            if let [w] = g.neighbours(v)[..] {
                possible.insert((case.labelling[&v], case.labelling[&w]));
            }
        }
    }
    let d = BehaviourDigraph { universe: profile.universe, arcs: possible };
    let perms = if profile.symmetric { permutations(profile.universe) } else { vec![(0..profile.universe).collect()] };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in d.embeddings(FORBIDDEN_VERTICES, &FORBIDDEN_ARCS) {
        let canon = perms
            .iter()
            .map(|perm| {
                let q: Vec<Id> = p.iter().map(|&i| perm[i as usize]).collect();
                let half = |a: Id, b: Id, c: Id| (a.min(c), b, a.max(c));
                let (h1, h2) = (half(q[0], q[1], q[2]), half(q[3], q[4], q[5]));
                (h1.min(h2), h1.max(h2))
            })
            .min()
            .expect("identity");
        if !seen.insert(canon) {
            continue;
        }
        let mut pinned = profile.clone();
        let mut clash = false;
        for &(a, b) in &FORBIDDEN_ARCS {
            let k = Key::f(p[a], &[p[b]], &[p[b]]);
            match profile.pinned.iter().find(|(pk, _)| *pk == k) {
                Some(&(_, v)) if v != 1 << p[b] => clash = true,
                Some(_) => {}
                None => pinned.pinned.push((k, 1 << p[b])),
            }
        }
        if clash {
            continue;
        }
        // a table surviving the whole suite survives the runs laid out
        // around the placement, so an empty search there settles it
        let layouts: Vec<[Id; 6]> = SIX_PATH_LAYOUTS.iter().map(|l| l.map(|i| p[i as usize])).collect();
        let present: BTreeSet<(Vec<(Id, Id)>, Vertex)> = pinned.suite.iter().map(case_key).collect();
        pinned.symmetric = false;
        let mut local = pinned.clone();
        local.suite = six_path_suite(&layouts).into_iter().filter(|c| present.contains(&case_key(c))).collect();
        let survivors = if local.suite.len() < pinned.suite.len() && exhaustive_search(&local)?.survivor_count == 0 {
            0
        } else {
            count_survivors(&pinned)?
        };
        out.push(PatternPlacement { placement: p, survivors });
    }
    Ok(out)
}

/// Labelled edge set and source label, as a run's identity.
fn case_key(c: &LabelledCase) -> (Vec<(Id, Id)>, Vertex) {
    let mut e: Vec<(Id, Id)> = c
        .graph
        .edges()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (c.labelling[&a], c.labelling[&b]);
            (x.min(y), x.max(y))
        })
        .collect();
    e.sort_unstable();
    (e, c.labelling[&c.source] as Vertex)
}
