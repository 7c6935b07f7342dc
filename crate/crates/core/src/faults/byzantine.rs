//! Weak-Byzantine adversaries: predicted capability, constructive
//! strategies, and exhaustive search over every strategy.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{FaultError, FaultLab, FaultSpec, Strategy};
use crate::engine::{self, Mask, Schedule, VMask, VertexSet};
use crate::graph::{Graph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByzantineCapability {
    pub can_block_broadcast: bool,
    pub can_block_termination: bool,
    /// A strategy cutting someone off, when the set separates a vertex from
    /// the initiators.
    pub broadcast_strategy: Option<FaultSpec>,
    pub broadcast_recipe: Option<BlockRecipe>,
    /// Honest play until the last controlled round, then one message toggled
    /// on a cycle or odd-cycle connector.
    pub termination_strategy: Option<FaultSpec>,
    /// Every emitted strategy achieved its goal when simulated.
    pub validated: bool,
}

/// How a broadcast-blocking strategy was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRecipe {
    /// The Byzantine vertices send nothing while controlled.
    Silence,
    /// They flood honestly within the initiators' side and never send
    /// across the cut, so that side quiets down before they are released.
    Prune,
    /// Found by exhaustive strategy search.
    Search,
}

fn silence(vertices: &[Vertex], horizon: usize) -> Strategy {
    let quiet: BTreeMap<Vertex, Vec<Vertex>> = vertices.iter().map(|&b| (b, Vec::new())).collect();
    (2..=horizon).map(|r| (r, quiet.clone())).collect()
}

/// Reachable part of `g - j` from the initiators.
fn initiator_side(g: &Graph, i: &VertexSet, j: &VertexSet) -> VertexSet {
    let mut seen = i.clone();
    let mut stack: Vec<Vertex> = i.iter().copied().collect();
    while let Some(x) = stack.pop() {
        for y in g.neighbours(x) {
            if !j.contains(&y) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

/// Byzantine sends of plain flooding on the subgraph spanned by the
/// initiators' side and the Byzantine vertices touching it.
fn prune(lab: &FaultLab, i: &VertexSet, j: &VertexSet, horizon: usize) -> Result<Option<Strategy>, FaultError> {
    let g = &lab.graph;
    let side = initiator_side(g, i, j);
    let mut keep = side.clone();
    for &b in j {
        if g.neighbours(b).iter().any(|w| side.contains(w)) {
            keep.insert(b);
        }
    }
    let edges: Vec<(Vertex, Vertex)> = g.edges().into_iter().filter(|(u, v)| keep.contains(u) && keep.contains(v)).collect();
    let vs: Vec<Vertex> = keep.iter().copied().collect();
    let Ok(sub) = Graph::new(&vs, &edges) else { return Ok(None) };
    let trace = engine::run(&sub, &vec![i.clone()], horizon)?;
    let mut strategy = silence(&j.iter().copied().collect::<Vec<_>>(), horizon);
    for r in 2..=horizon {
        let Some(cfg) = trace.round(r) else { break };
        for &(u, v) in cfg {
            if j.contains(&u) {
                strategy.get_mut(&r).unwrap().get_mut(&u).unwrap().push(v);
            }
        }
    }
    Ok(Some(strategy))
}

fn check_sets(g: &Graph, i: &VertexSet, j: &VertexSet) -> Result<(), FaultError> {
    if i.is_empty() {
        return Err(FaultError::EmptySchedule);
    }
    for &v in i.iter().chain(j) {
        if !g.contains(v) {
            return Err(crate::graph::GraphError::UnknownVertex(v).into());
        }
    }
    if let Some(&v) = i.intersection(j).next() {
        return Err(FaultError::ByzantineInitiator(v));
    }
    Ok(())
}

/// Some non-Byzantine vertex is cut off from every initiator once `j` is removed.
fn separates(g: &Graph, i: &VertexSet, j: &VertexSet) -> bool {
    let seen = initiator_side(g, i, j);
    g.vertices().iter().any(|v| !j.contains(v) && !seen.contains(v))
}

pub fn byzantine_capability(g: &Graph, i: &VertexSet, j: &VertexSet, horizon: Option<usize>) -> Result<ByzantineCapability, FaultError> {
    let lab = FaultLab::new(g)?;
    capability_with(&lab, i, j, horizon)
}

pub(crate) fn capability_with(lab: &FaultLab, i: &VertexSet, j: &VertexSet, horizon: Option<usize>) -> Result<ByzantineCapability, FaultError> {
    let g = &lab.graph;
    check_sets(g, i, j)?;
    let horizon = horizon.unwrap_or(2 * g.diameter()).max(2);
    let can_block_broadcast = separates(g, i, j);
    let mut can_block_termination = false;
    for &b in j {
        can_block_termination |= g.on_cycle_or_fec(b)?;
    }
    let schedule: Schedule = vec![i.clone()];
    let vertices: Vec<Vertex> = j.iter().copied().collect();
    let cap = 4 * g.m() + horizon + 2;
    let mut validated = true;

    let mut broadcast_recipe = None;
    let broadcast_strategy = if can_block_broadcast {
        let mut found = None;
        for recipe in [BlockRecipe::Silence, BlockRecipe::Prune, BlockRecipe::Search] {
            let strategy = match recipe {
                BlockRecipe::Silence => Some(silence(&vertices, horizon)),
                BlockRecipe::Prune => prune(lab, i, j, horizon)?,
                BlockRecipe::Search => exhaustive_with(lab, i, j, horizon)?.broadcast_strategy,
            };
            let Some(strategy) = strategy else { continue };
            let spec = FaultSpec::Byzantine { vertices: vertices.clone(), horizon, strategy };
            let (_, v) = lab.run(&schedule, &spec, cap)?;
            if !v.broadcast_ok {
                found = Some(spec);
                broadcast_recipe = Some(recipe);
                break;
            }
        }
        validated &= found.is_some();
        found
    } else {
        None
    };

    let termination_strategy = if can_block_termination {
        let spec = termination_spec(lab, &schedule, &vertices, horizon)?;
        match spec {
            Some(spec) => {
                let (_, v) = lab.run(&schedule, &spec, cap)?;
                validated &= matches!(v.termination, super::Termination::NonTerminating { .. });
                Some(spec)
            }
            None => {
                validated = false;
                None
            }
        }
    } else {
        None
    };

    Ok(ByzantineCapability { can_block_broadcast, can_block_termination, broadcast_strategy, broadcast_recipe, termination_strategy, validated })
}

/// Honest until `horizon - 1`; in the last controlled round one Byzantine
/// vertex adds or withholds a single message so that the configuration left
/// behind is imbalanced.
fn termination_spec(lab: &FaultLab, schedule: &Schedule, vertices: &[Vertex], horizon: usize) -> Result<Option<FaultSpec>, FaultError> {
    let t = &lab.table;
    let sched = lab.schedule_masks(schedule)?;
    let mut s: Mask = 0;
    for r in 1..=horizon {
        s = t.step(s, sched.get(r - 1).copied().unwrap_or(0));
    }
    let imbalanced = |m: Mask| match &lab.checker {
        Some(bc) => !bc.balanced_mask(m),
        None => t.quiescence(m).is_none(),
    };
    for &b in vertices {
        let bi = t.vertex_index(b).unwrap();
        for w in lab.graph.neighbours(b) {
            let k = t.arc_index((b, w)).unwrap();
            let toggled = s ^ (1 << k);
            if imbalanced(toggled) {
                let sends = toggled & t.out_mask(bi);
                let targets: Vec<Vertex> = engine::bits(sends).map(|a| t.arc_msg(a).1).collect();
                let strategy: Strategy = BTreeMap::from([(horizon, BTreeMap::from([(b, targets)]))]);
                return Ok(Some(FaultSpec::Byzantine { vertices: vertices.to_vec(), horizon, strategy }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByzantineSearch {
    pub horizon: usize,
    pub can_block_broadcast: bool,
    pub can_block_termination: bool,
    pub broadcast_strategy: Option<Strategy>,
    pub termination_strategy: Option<Strategy>,
    /// Distinct (round, configuration, informed) states expanded.
    pub states: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Broadcast,
    Termination,
}

struct Search<'a> {
    lab: &'a FaultLab,
    members: VMask,
    member_out: Mask,
    horizon: usize,
    goal: Goal,
    visited: HashSet<(usize, Mask, VMask)>,
    future: HashMap<Mask, VMask>,
    everyone: VMask,
}

impl Search<'_> {
    /// Vertices informed by plain flooding from `s` onwards.
    fn future_informed(&mut self, s: Mask) -> VMask {
        if let Some(&f) = self.future.get(&s) {
            return f;
        }
        let t = &self.lab.table;
        let mut seen = HashSet::new();
        let mut cur = s;
        let mut acc = 0;
        while cur != 0 && seen.insert(cur) {
            acc |= t.receivers(cur);
            cur = t.step(cur, 0);
        }
        self.future.insert(s, acc);
        acc
    }

    fn success(&mut self, s: Mask, informed: VMask) -> bool {
        match self.goal {
            Goal::Termination => match &self.lab.checker {
                Some(bc) => !bc.balanced_mask(s),
                None => self.lab.table.quiescence(s).is_none(),
            },
            Goal::Broadcast => {
                let all = informed | self.future_informed(s);
                (self.everyone & !self.members & !all) != 0
            }
        }
    }

    /// Extends a run whose round-`r - 1` configuration is `prev`; returns the
    /// Byzantine sends of rounds `r..=horizon` when the goal is reachable.
    fn dfs(&mut self, r: usize, prev: Mask, informed: VMask, path: &mut Vec<Mask>) -> bool {
        let t = &self.lab.table;
        let honest = t.step(prev, 0) & !self.member_out;
        let mut c: Mask = 0;
        loop {
            let s = honest | c;
            let inf = informed | t.receivers(s);
            let key_inf = if self.goal == Goal::Broadcast { inf & !self.members } else { 0 };
            if self.visited.insert((r, s, key_inf)) {
                path.push(c);
                let done = if r == self.horizon { self.success(s, inf) } else { self.dfs(r + 1, s, inf, path) };
                if done {
                    return true;
                }
                path.pop();
            }
            // next submask of the Byzantine out-arcs
            c = (c.wrapping_sub(self.member_out)) & self.member_out;
            if c == 0 {
                return false;
            }
        }
    }
}

fn to_strategy(lab: &FaultLab, members: VMask, path: &[Mask]) -> Strategy {
    let t = &lab.table;
    path.iter()
        .enumerate()
        .map(|(k, &c)| {
            let per = engine::vbits(members)
                .map(|b| {
                    let targets = engine::bits(c & t.out_mask(b)).map(|a| t.arc_msg(a).1).collect();
                    (t.id(b), targets)
                })
                .collect();
            (k + 2, per)
        })
        .collect()
}

/// Tries every strategy of `j` over rounds `2..=horizon`, skipping states
/// already expanded for the same round.
pub fn exhaustive_byzantine(g: &Graph, i: &VertexSet, j: &VertexSet, horizon: usize) -> Result<ByzantineSearch, FaultError> {
    let lab = FaultLab::new(g)?;
    exhaustive_with(&lab, i, j, horizon)
}

pub(crate) fn exhaustive_with(lab: &FaultLab, i: &VertexSet, j: &VertexSet, horizon: usize) -> Result<ByzantineSearch, FaultError> {
    let g = &lab.graph;
    check_sets(g, i, j)?;
    if horizon < 2 {
        return Err(FaultError::ShortHorizon { horizon, needed: 2 });
    }
    let t = &lab.table;
    let initial = t.vmask_of(i.iter().copied())?;
    let members = t.vmask_of(j.iter().copied())?;
    let s1 = t.step(0, initial);
    let mut states = 0;
    let mut out = ByzantineSearch {
        horizon,
        can_block_broadcast: false,
        can_block_termination: false,
        broadcast_strategy: None,
        termination_strategy: None,
        states: 0,
    };
    for goal in [Goal::Broadcast, Goal::Termination] {
        let mut search = Search {
            lab,
            members,
            member_out: t.out_of(members),
            horizon,
            goal,
            visited: HashSet::new(),
            future: HashMap::new(),
            everyone: (1u128 << t.n()) - 1,
        };
        let mut path = Vec::new();
        let found = search.dfs(2, s1, initial | t.receivers(s1), &mut path);
        states += search.visited.len();
        let strategy = found.then(|| to_strategy(lab, members, &path));
        match goal {
            Goal::Broadcast => {
                out.can_block_broadcast = found;
                out.broadcast_strategy = strategy;
            }
            Goal::Termination => {
                out.can_block_termination = found;
                out.termination_strategy = strategy;
            }
        }
    }
    out.states = states;
    Ok(out)
}
