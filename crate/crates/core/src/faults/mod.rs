//! Message drops, uni-directional link failures and weak-Byzantine control.

pub(crate) mod byzantine;
pub(crate) mod drop;
pub(crate) mod unidir;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use byzantine::{byzantine_capability, BlockRecipe, exhaustive_byzantine, ByzantineCapability, ByzantineSearch};
pub use drop::{classify_drop, observe_drop, DropPrediction, Occurrence};
pub use unidir::{bad_source, find_breaking_edge, mixed_cycle_certificate, mixed_cycle_check, BreakingEdge, MixedCertificate, Recipe};

use crate::balance::{BalanceChecker, Witness, MAX_EXHAUSTIVE_VERTICES};
use crate::engine::{self, ArcTable, EngineError, Mask, Schedule, Trace, TraceBuilder, VMask, VertexSet};
use crate::graph::{Graph, GraphError, Msg, Vertex};

/// Per-round sends of the Byzantine vertices: round -> vertex -> targets.
/// A missing entry means the vertex behaves honestly in that round.
pub type Strategy = BTreeMap<usize, BTreeMap<Vertex, Vec<Vertex>>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FaultSpec {
    /// `messages` are removed from round `round`'s configuration.
    Drop { messages: Vec<Msg>, round: usize },
    /// Oriented links that fail in every round.
    Unidirectional { arcs: Vec<Msg> },
    /// The adversary chooses the sends of `vertices` in rounds `2..=horizon`.
    Byzantine { vertices: Vec<Vertex>, horizon: usize, strategy: Strategy },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FaultError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("graph has more than 64 edges")]
    TooLarge,
    #[error("drop round must be at least 1")]
    BadRound,
    #[error("message ({0}, {1}) is not sent in round {2}")]
    NotSent(Vertex, Vertex, usize),
    #[error("horizon {horizon} is shorter than twice the diameter ({needed})")]
    ShortHorizon { horizon: usize, needed: usize },
    #[error("Byzantine vertex {0} is an initiator")]
    ByzantineInitiator(Vertex),
    #[error("strategy names {0}, which is not a Byzantine vertex")]
    NotByzantine(Vertex),
    #[error("strategy round {0} lies outside 2..=horizon")]
    StrategyRound(usize),
    #[error("{0} cannot send to non-neighbour {1}")]
    BadTarget(Vertex, Vertex),
    #[error("schedule is empty")]
    EmptySchedule,
    #[error("no initiator may be the whole vertex set")]
    AllInitiators,
    #[error("not applicable: {0}")]
    Inapplicable(String),
    #[error("no breaking edge found")]
    NoBreakingEdge,
}

/// Why a run is known never to empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// The configuration left once the fault stops acting is imbalanced.
    Imbalance { round: usize, witness: Witness },
    /// A cycle with more messages along its surviving arcs than against them.
    MixedCycle { round: usize, certificate: MixedCertificate },
    /// `S_first == S_{first + period}` with no initiator pending.
    Recurrence { first: usize, period: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Terminated { round: usize },
    NonTerminating { certificate: Certificate },
    /// Neither emptiness nor a repeat was reached within the search limit.
    Inconclusive { rounds: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultVerdict {
    /// Every vertex that should learn the message eventually does.
    pub broadcast_ok: bool,
    pub terminated: bool,
    pub termination: Termination,
    /// First round whose configuration differs from the fault-free run.
    pub first_violation_round: Option<usize>,
    /// Vertices never informed (Byzantine vertices excluded).
    pub uninformed: Vec<Vertex>,
    /// The fault never changed anything (e.g. a drop after termination).
    pub no_op: bool,
}

impl FaultVerdict {
    /// Non-termination or non-broadcast.
    pub fn is_bad(&self) -> bool {
        !self.broadcast_ok || matches!(self.termination, Termination::NonTerminating { .. })
    }

    pub fn inconclusive(&self) -> bool {
        matches!(self.termination, Termination::Inconclusive { .. })
    }
}

/// A fault lowered onto arc bitmasks.
#[derive(Clone, Debug, Default)]
pub(crate) enum Compiled {
    #[default]
    None,
    Drop { round: usize, messages: Mask },
    Unidir { failed: Mask },
    Byzantine { members: VMask, horizon: usize, sends: HashMap<(usize, usize), Mask> },
}

impl Compiled {
    /// Last round in which the fault can change the dynamics; afterwards the
    /// step map is time-invariant.
    fn may_inject_until(&self) -> usize {
        match self {
            Compiled::Byzantine { horizon, .. } => *horizon,
            _ => 0,
        }
    }

    fn active_until(&self) -> usize {
        match self {
            Compiled::None | Compiled::Unidir { .. } => 0,
            Compiled::Drop { round, .. } => *round,
            Compiled::Byzantine { horizon, .. } => *horizon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Fate {
    Empty(usize),
    Recurrent { first: usize, period: usize },
    Unknown(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    /// `rounds[i] = S_{i+1}`, recorded up to the cap.
    pub rounds: Vec<Mask>,
    pub informed: VMask,
    pub fate: Fate,
    /// First round from which the dynamics are the plain (possibly
    /// link-failed) flooding map, and the configuration there.
    pub settle_round: usize,
    pub settle_config: Mask,
}

/// Beyond the round cap, how many further configurations repeat detection
/// may store before giving up.
pub const REPEAT_LIMIT: usize = 1 << 20;

/// Per-graph state shared by the fault simulators.
#[derive(Clone, Debug)]
pub struct FaultLab {
    pub graph: Graph,
    pub table: ArcTable,
    pub checker: Option<BalanceChecker>,
}

impl FaultLab {
    pub fn new(g: &Graph) -> Result<FaultLab, FaultError> {
        let table = ArcTable::new(g).ok_or(FaultError::TooLarge)?;
        let checker = if g.n() <= MAX_EXHAUSTIVE_VERTICES {
            BalanceChecker::new(g).ok()
        } else {
            None
        };
        Ok(FaultLab { graph: g.clone(), table, checker })
    }

    pub(crate) fn schedule_masks(&self, schedule: &Schedule) -> Result<Vec<VMask>, FaultError> {
        if schedule.is_empty() {
            return Err(FaultError::EmptySchedule);
        }
        schedule
            .iter()
            .map(|i| Ok(self.table.vmask_of(i.iter().copied())?))
            .collect()
    }

    pub(crate) fn compile(&self, fault: &FaultSpec, schedule: &Schedule) -> Result<Compiled, FaultError> {
        let g = &self.graph;
        let t = &self.table;
        Ok(match fault {
            FaultSpec::Drop { messages, round } => {
                if *round == 0 {
                    return Err(FaultError::BadRound);
                }
                let set: engine::Configuration = messages.iter().copied().collect();
                Compiled::Drop { round: *round, messages: t.mask_of(&set)? }
            }
            FaultSpec::Unidirectional { arcs } => {
                let set: engine::Configuration = arcs.iter().copied().collect();
                Compiled::Unidir { failed: t.mask_of(&set)? }
            }
            FaultSpec::Byzantine { vertices, horizon, strategy } => {
                let needed = 2 * g.diameter();
                if *horizon < needed {
                    return Err(FaultError::ShortHorizon { horizon: *horizon, needed });
                }
                let members: BTreeSet<Vertex> = vertices.iter().copied().collect();
                let initiators: BTreeSet<Vertex> = schedule.iter().flatten().copied().collect();
                if let Some(&v) = members.intersection(&initiators).next() {
                    return Err(FaultError::ByzantineInitiator(v));
                }
                let member_mask = t.vmask_of(members.iter().copied())?;
                let mut sends = HashMap::new();
                for (&r, per) in strategy {
                    if r < 2 || r > *horizon {
                        return Err(FaultError::StrategyRound(r));
                    }
                    for (&b, targets) in per {
                        if !members.contains(&b) {
                            return Err(FaultError::NotByzantine(b));
                        }
                        let mut m = 0;
                        for &w in targets {
                            let k = t.arc_index((b, w)).ok_or(FaultError::BadTarget(b, w))?;
                            m |= 1 << k;
                        }
                        sends.insert((r, t.vertex_index(b).unwrap()), m);
                    }
                }
                Compiled::Byzantine { members: member_mask, horizon: *horizon, sends }
            }
        })
    }

    /// `S_r` from `S_{r-1}` under the fault.
    #[inline]
    pub(crate) fn step(&self, c: &Compiled, r: usize, prev: Mask, init: VMask) -> Mask {
        let t = &self.table;
        let base = t.step(prev, init);
        match c {
            Compiled::None => base,
            Compiled::Drop { round, messages } => {
                if r == *round {
                    base & !messages
                } else {
                    base
                }
            }
            Compiled::Unidir { failed } => base & !failed,
            Compiled::Byzantine { members, horizon, sends } => {
                if r < 2 || r > *horizon {
                    return base;
                }
                let mut out = base & !t.out_of(*members);
                for b in engine::vbits(*members) {
                    out |= match sends.get(&(r, b)) {
                        Some(&m) => m,
                        None => base & t.out_mask(b),
                    };
                }
                out
            }
        }
    }

    /// Runs to emptiness or to a repeat once the fault is inert; records
    /// configurations up to `round_cap`.
    pub(crate) fn outcome(&self, sched: &[VMask], c: &Compiled, round_cap: usize) -> Outcome {
        let t = &self.table;
        let settle_round = sched.len().max(c.active_until()).max(1);
        let mut rounds = Vec::new();
        let mut informed: VMask = 0;
        let mut seen: HashMap<Mask, usize> = HashMap::new();
        let mut s: Mask = 0;
        let mut settle_config = 0;
        let mut r = 0;
        loop {
            r += 1;
            let init = sched.get(r - 1).copied().unwrap_or(0);
            s = self.step(c, r, s, init);
            informed |= init | t.receivers(s);
            if r <= round_cap {
                rounds.push(s);
            }
            if r == settle_round {
                settle_config = s;
            }
            if s == 0 && r >= sched.len() && r >= c.may_inject_until() {
                return Outcome { rounds, informed, fate: Fate::Empty(r), settle_round, settle_config };
            }
            if r >= settle_round {
                if let Some(&first) = seen.get(&s) {
                    // keep stepping only to fill the recorded prefix
                    while r < round_cap {
                        r += 1;
                        s = self.step(c, r, s, 0);
                        rounds.push(s);
                    }
                    let period = seen.len() + settle_round - first;
                    return Outcome {
                        rounds,
                        informed,
                        fate: Fate::Recurrent { first, period },
                        settle_round,
                        settle_config,
                    };
                }
                seen.insert(s, r);
                if seen.len() > REPEAT_LIMIT && r >= round_cap {
                    return Outcome { rounds, informed, fate: Fate::Unknown(r), settle_round, settle_config };
                }
            }
        }
    }

    /// Full verdict for one fault; `excused` vertices need not be informed.
    pub(crate) fn judge(&self, sched: &[VMask], c: &Compiled, round_cap: usize, excused: VMask) -> (Outcome, FaultVerdict) {
        let t = &self.table;
        let out = self.outcome(sched, c, round_cap);
        let clean = self.outcome(sched, &Compiled::None, round_cap.max(out.rounds.len()));
        let first_violation_round = first_difference(&clean, &out);
        let everyone: VMask = (1u128 << t.n()) - 1;
        let missing = everyone & !excused & !out.informed;
        let uninformed: Vec<Vertex> = engine::vbits(missing).map(|i| t.id(i)).collect();
        let termination = match out.fate {
            Fate::Empty(round) => Termination::Terminated { round },
            Fate::Unknown(rounds) => Termination::Inconclusive { rounds },
            Fate::Recurrent { first, period } => Termination::NonTerminating { certificate: self.certify(sched, c, &out, first, period) },
        };
        let no_op = first_violation_round.is_none();
        let verdict = FaultVerdict {
            broadcast_ok: uninformed.is_empty(),
            terminated: matches!(termination, Termination::Terminated { .. }),
            termination,
            first_violation_round,
            uninformed,
            no_op,
        };
        (out, verdict)
    }

    fn certify(&self, sched: &[VMask], c: &Compiled, out: &Outcome, first: usize, period: usize) -> Certificate {
        let t = &self.table;
        match c {
            Compiled::Unidir { failed } => {
                let arcs: Vec<Msg> = engine::bits(*failed).map(|k| t.arc_msg(k)).collect();
                let mut s = 0;
                for r in 1..=first + period {
                    let init = sched.get(r - 1).copied().unwrap_or(0);
                    s = self.step(c, r, s, init);
                    if let Some(cert) = mixed_cycle_certificate(&self.graph, &arcs, &t.config_of(s)) {
                        return Certificate::MixedCycle { round: r, certificate: cert };
                    }
                }
                Certificate::Recurrence { first, period }
            }
            _ => {
                if let Some(bc) = &self.checker {
                    let cfg = t.config_of(out.settle_config);
                    if let Ok(v) = bc.check(&cfg) {
                        if let Some(witness) = v.witness {
                            return Certificate::Imbalance { round: out.settle_round, witness };
                        }
                    }
                }
                Certificate::Recurrence { first, period }
            }
        }
    }

    pub(crate) fn trace_of(&self, schedule: &Schedule, out: &Outcome) -> Trace {
        let mut b = TraceBuilder::new(&self.graph, schedule.clone());
        let end = match out.fate {
            Fate::Empty(r) => r.min(out.rounds.len()),
            _ => out.rounds.len(),
        };
        for &s in &out.rounds[..end] {
            b.push(self.table.config_of(s));
        }
        let mut trace = b.finish();
        trace.terminated_at = match out.fate {
            Fate::Empty(r) if r <= out.rounds.len() => Some(r),
            _ => None,
        };
        trace
    }
}

fn first_difference(a: &Outcome, b: &Outcome) -> Option<usize> {
    let n = a.rounds.len().max(b.rounds.len());
    (0..n)
        .find(|&i| a.rounds.get(i).copied().unwrap_or(0) != b.rounds.get(i).copied().unwrap_or(0))
        .map(|i| i + 1)
        .or_else(|| (a.fate != b.fate).then_some(n + 1))
}

/// Runs `schedule` under `fault`, recording at most `round_cap` rounds.
///
/// Termination is decided exactly: the run is continued past the cap until
/// it empties or repeats a configuration once the fault is inert. A drop
/// aimed at a round after natural termination is reported as a no-op.
pub fn run_with_fault(g: &Graph, schedule: &Schedule, fault: &FaultSpec, round_cap: usize) -> Result<(Trace, FaultVerdict), FaultError> {
    let lab = FaultLab::new(g)?;
    lab.run(schedule, fault, round_cap)
}

impl FaultLab {
    pub fn run(&self, schedule: &Schedule, fault: &FaultSpec, round_cap: usize) -> Result<(Trace, FaultVerdict), FaultError> {
        let sched = self.schedule_masks(schedule)?;
        let c = self.compile(fault, schedule)?;
        let mut excused = 0;
        if let (Compiled::Drop { round, messages }, FaultSpec::Drop { .. }) = (&c, fault) {
            let clean = self.outcome(&sched, &Compiled::None, *round);
            let ended = matches!(clean.fate, Fate::Empty(e) if e <= *round);
            if !ended {
                let sent = clean.rounds.get(round - 1).copied().unwrap_or(0);
                if let Some(k) = engine::bits(*messages & !sent).next() {
                    let (u, v) = self.table.arc_msg(k);
                    return Err(FaultError::NotSent(u, v, *round));
                }
            }
        }
        if let Compiled::Byzantine { members, .. } = &c {
            excused = *members;
        }
        let (out, verdict) = self.judge(&sched, &c, round_cap, excused);
        Ok((self.trace_of(schedule, &out), verdict))
    }
}

impl FaultLab {
    /// The fault-free run, judged with the same exact termination test.
    pub fn run_clean(&self, schedule: &Schedule, round_cap: usize) -> Result<(Trace, FaultVerdict), FaultError> {
        let sched = self.schedule_masks(schedule)?;
        let (out, verdict) = self.judge(&sched, &Compiled::None, round_cap, 0);
        Ok((self.trace_of(schedule, &out), verdict))
    }
}

/// Default cap for faulty runs: `4|E| + |schedule| + 1`, or the Byzantine
/// horizon plus that when larger.
pub fn fault_cap(g: &Graph, schedule: &Schedule, fault: &FaultSpec) -> usize {
    let base = 4 * g.m() + schedule.len() + 1;
    match fault {
        FaultSpec::Byzantine { horizon, .. } => base + horizon,
        FaultSpec::Drop { round, .. } => base.max(round + 1),
        FaultSpec::Unidirectional { .. } => base,
    }
}

pub(crate) fn single_schedule(v: Vertex) -> Schedule {
    vec![VertexSet::from([v])]
}
