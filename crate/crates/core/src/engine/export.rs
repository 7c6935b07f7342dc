//! Trace records for JSON-lines, CSV and DOT output.

use serde::{Deserialize, Serialize};

use super::Trace;
use crate::graph::io::to_dot;
use crate::graph::{Graph, Vertex};

/// One round: the messages sent and every vertex informed so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub sent: Vec<[Vertex; 2]>,
    pub informed: Vec<Vertex>,
}

pub fn round_records(trace: &Trace) -> Vec<RoundRecord> {
    (1..=trace.rounds.len())
        .map(|r| RoundRecord {
            round: r,
            sent: trace.rounds[r - 1].iter().map(|&(u, v)| [u, v]).collect(),
            informed: trace.informed.iter().filter(|&(_, &at)| at <= r).map(|(&v, _)| v).collect(),
        })
        .collect()
}

/// Records as JSON lines, each terminated by a newline.
pub fn to_jsonl(trace: &Trace) -> String {
    let mut out = String::new();
    for rec in round_records(trace) {
        out.push_str(&serde_json::to_string(&rec).expect("plain record"));
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub rounds_recorded: usize,
    pub sending_rounds: usize,
    pub terminated_at: Option<usize>,
    pub broadcast_round: Option<usize>,
    pub informed: usize,
    pub vertices: usize,
}

pub fn summarize(g: &Graph, trace: &Trace) -> TraceSummary {
    TraceSummary {
        rounds_recorded: trace.rounds.len(),
        sending_rounds: trace.sending_rounds(),
        terminated_at: trace.terminated_at,
        broadcast_round: trace.broadcast_round(),
        informed: trace.informed.len(),
        vertices: g.n(),
    }
}

/// One DOT graph per round with that round's messages highlighted.
pub fn dot_frames(g: &Graph, trace: &Trace) -> Vec<String> {
    trace
        .rounds
        .iter()
        .enumerate()
        .map(|(i, s)| to_dot(g, &format!("round_{}", i + 1), &s.iter().copied().collect::<Vec<_>>()))
        .collect()
}
