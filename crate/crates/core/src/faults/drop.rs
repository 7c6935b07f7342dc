//! Single message drops and their predicted effect.

use serde::{Deserialize, Serialize};

use super::{single_schedule, Compiled, FaultError, FaultLab, FaultVerdict};
use crate::engine;
use crate::graph::{Graph, Msg, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Occurrence {
    First,
    Second,
}

impl Occurrence {
    fn index(self) -> usize {
        match self {
            Occurrence::First => 0,
            Occurrence::Second => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropPrediction {
    /// Round of the fault-free run in which the message is sent.
    pub round: usize,
    /// No earlier round carries a message over the same undirected edge.
    pub first_use_of_edge: bool,
    pub non_termination: bool,
    pub non_broadcast: bool,
}

/// Rounds of the fault-free single-source run carrying `(u, v)`, and the
/// first round carrying either orientation.
fn usage(lab: &FaultLab, source: Vertex, edge: Msg) -> Result<(Vec<usize>, Option<usize>), FaultError> {
    let t = &lab.table;
    let sched = lab.schedule_masks(&single_schedule(source))?;
    let k = t.arc_index(edge).ok_or(engine::EngineError::NoEdge(edge.0, edge.1))?;
    let back = k ^ 1;
    let clean = lab.outcome(&sched, &Compiled::None, 4 * lab.graph.m() + 2);
    let rounds: Vec<usize> = (0..clean.rounds.len()).filter(|&i| clean.rounds[i] >> k & 1 == 1).map(|i| i + 1).collect();
    let first_either = (0..clean.rounds.len()).find(|&i| clean.rounds[i] >> k & 1 == 1 || clean.rounds[i] >> back & 1 == 1).map(|i| i + 1);
    Ok((rounds, first_either))
}

/// Predicted outcome of dropping one message: non-termination when `uv` is
/// not a bridge or lies on a path joining two odd cycles; non-broadcast iff
/// the message is the first one over `uv`, `uv` is a bridge and `u`'s side
/// has no odd cycle.
pub fn classify_drop(g: &Graph, source: Vertex, edge: Msg, occurrence: Occurrence) -> Result<DropPrediction, FaultError> {
    let lab = FaultLab::new(g)?;
    classify_with(&lab, source, edge, occurrence)
}

pub(crate) fn classify_with(lab: &FaultLab, source: Vertex, edge: Msg, occurrence: Occurrence) -> Result<DropPrediction, FaultError> {
    let g = &lab.graph;
    let (u, v) = edge;
    let (rounds, first_either) = usage(lab, source, edge)?;
    let round = *rounds
        .get(occurrence.index())
        .ok_or_else(|| FaultError::Inapplicable(format!("({u}, {v}) has no {occurrence:?} occurrence from {source}")))?;
    let bridge = g.is_bridge(u, v)?;
    let first_use_of_edge = first_either == Some(round);
    Ok(DropPrediction {
        round,
        first_use_of_edge,
        non_termination: !bridge || g.on_odd_cycle_path(u, v)?,
        non_broadcast: first_use_of_edge && bridge && !g.side_has_odd_cycle(u, v, u)?,
    })
}

/// Simulated verdict for dropping `(u, v)` at the given occurrence.
pub fn observe_drop(lab: &FaultLab, source: Vertex, edge: Msg, occurrence: Occurrence) -> Result<(DropPrediction, FaultVerdict), FaultError> {
    let p = classify_with(lab, source, edge, occurrence)?;
    let fault = super::FaultSpec::Drop { messages: vec![edge], round: p.round };
    let sched = single_schedule(source);
    let (_, verdict) = lab.run(&sched, &fault, 4 * lab.graph.m())?;
    Ok((p, verdict))
}
