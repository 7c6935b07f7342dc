//! Stateless broadcast protocols as explicit tables, and exhaustive search
//! over them.
//!
//! A protocol is a pair `(b, f)`: the initiator with neighbour identifiers
//! `N` sends to `b(id, N)`, and afterwards a node that heard from `T` sends
//! to `f(id, N, T)`. Flooding is `b(u, N) = N`, `f(u, N, T) = N \ T`.

mod digraph;
mod search;
mod sim;
mod table;

use thiserror::Error;

use crate::graph::Vertex;

pub use digraph::{forbidden_digraph_check, necessary_conditions, BehaviourDigraph, Violation, FORBIDDEN_ARCS, FORBIDDEN_VERTICES};
pub use search::{
    count_survivors, deviating_ids, deviations, exhaustive_search, forbidden_pattern_search, labelled_suite, labellings, minimal_exceptions, table_space_log2, BlockInfo, SearchProfile, SearchReport, Situation, SurvivorClass, PatternPlacement, SIX_PATH_LAYOUTS,
    SEARCH_DEGREE_LIMIT, SEARCH_UNIVERSE_LIMIT,
};
pub use sim::{check_protocol, simulate_protocol, CheckReport, Counterexample, Failure, LabelledCase, Labelling};
pub use table::{af_table, ids, set_of, Id, IdSet, Key, ProtocolTable, MAX_UNIVERSE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtoError {
    #[error("identifier universe must have 2..=8 members, got {0}")]
    Universe(u8),
    #[error("degree bound must be positive")]
    DegreeBound,
    #[error("{0} is outside the table's domain")]
    OutOfDomain(String),
    #[error("{0} sends to a non-neighbour")]
    NotNeighbours(String),
    #[error("vertex {0} has no identifier")]
    Unlabelled(Vertex),
    #[error("vertex {0} carries identifier {1} outside the universe")]
    LabelOutside(Vertex, Id),
    #[error("identifier {0} is used twice")]
    NotInjective(Id),
    #[error("vertex {vertex} has degree {degree} above the table's bound {d_max}")]
    Degree { vertex: Vertex, degree: usize, d_max: u8 },
    #[error("source {0} is not a vertex")]
    UnknownSource(Vertex),
    #[error("round cap must be positive")]
    BadCap,
    #[error("entry {0} is unassigned")]
    Unassigned(String),
    #[error("search space too large: about 2^{log2_tables} tables")]
    TooLarge { log2_tables: u64 },
}
