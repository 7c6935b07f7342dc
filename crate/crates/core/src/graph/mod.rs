//! Finite simple connected graphs with stable vertex identifiers.
//!
//! Identifiers are arbitrary `u32` values. Internally every vertex also has a
//! dense index (its rank among the sorted identifiers), which the hot loops in
//! the rest of the crate use.

mod atlas;
mod cycles;
mod gadgets;
pub mod io;
mod query;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

pub use atlas::{connected_graphs, random_connected_sample};
pub use cycles::{enumerate_cycles, enumerate_fecs, Cycle, Fec};
pub use gadgets::{generate, Gadget};
pub use query::{structural_query, Answer, Query};

pub type Vertex = u32;
/// A directed message `(sender, receiver)`.
pub type Msg = (Vertex, Vertex);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(Vertex, Vertex),
    #[error("edge endpoint {0} is not a declared vertex")]
    UnknownVertex(Vertex),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(Vertex),
    #[error("graph must have at least two vertices")]
    TooSmall,
    #[error("graph is not connected")]
    Disconnected,
    #[error("port order for vertex {0} is not a permutation of its neighbourhood")]
    BadPorts(Vertex),
    #[error("no edge {0}-{1}")]
    NoEdge(Vertex, Vertex),
    #[error("invalid parameters: {0}")]
    Param(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    ids: Vec<Vertex>,
    nbrs: Vec<Vec<usize>>,
    ports: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from declared vertices and undirected edges.
    pub fn new(vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        let mut ids = vertices.to_vec();
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0]));
            }
        }
        if ids.len() < 2 {
            return Err(GraphError::TooSmall);
        }
        let n = ids.len();
        let mut nbrs = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let a = ids.binary_search(&u).map_err(|_| GraphError::UnknownVertex(u))?;
            let b = ids.binary_search(&v).map_err(|_| GraphError::UnknownVertex(v))?;
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(GraphError::ParallelEdge(u.min(v), u.max(v)));
            }
            nbrs[a].push(b);
            nbrs[b].push(a);
        }
        for list in &mut nbrs {
            list.sort_unstable();
        }
        let g = Graph {
            ids,
            ports: nbrs.clone(),
            nbrs,
            edges: seen.into_iter().collect(),
        };
        if !g.is_connected_without(&[], None) {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    /// Builds a graph whose vertex set is the set of edge endpoints.
    pub fn from_edges(edges: &[(Vertex, Vertex)]) -> Result<Graph, GraphError> {
        let vs: BTreeSet<Vertex> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        let vs: Vec<Vertex> = vs.into_iter().collect();
        Graph::new(&vs, edges)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Vertex identifiers in ascending order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.ids
    }

    /// Edges as identifier pairs `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.ids[a], self.ids[b]))
            .collect()
    }

    pub fn index(&self, v: Vertex) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    pub fn id(&self, i: usize) -> Vertex {
        self.ids[i]
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index(v).is_some()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        match (self.index(u), self.index(v)) {
            (Some(a), Some(b)) => self.nbrs[a].binary_search(&b).is_ok(),
            _ => false,
        }
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.index(v).map_or(0, |i| self.nbrs[i].len())
    }

    /// Neighbours of `v` in ascending identifier order.
    pub fn neighbours(&self, v: Vertex) -> Vec<Vertex> {
        match self.index(v) {
            Some(i) => self.nbrs[i].iter().map(|&j| self.ids[j]).collect(),
            None => Vec::new(),
        }
    }

    /// Neighbours of `v` in port order.
    pub fn ports(&self, v: Vertex) -> Vec<Vertex> {
        match self.index(v) {
            Some(i) => self.ports[i].iter().map(|&j| self.ids[j]).collect(),
            None => Vec::new(),
        }
    }

    /// Overrides the port order of one vertex.
    pub fn set_ports(&mut self, v: Vertex, order: &[Vertex]) -> Result<(), GraphError> {
        let i = self.index(v).ok_or(GraphError::UnknownVertex(v))?;
        let mut idx = Vec::with_capacity(order.len());
        for &w in order {
            idx.push(self.index(w).ok_or(GraphError::BadPorts(v))?);
        }
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if sorted != self.nbrs[i] {
            return Err(GraphError::BadPorts(v));
        }
        self.ports[i] = idx;
        Ok(())
    }

    pub(crate) fn nbr_idx(&self, i: usize) -> &[usize] {
        &self.nbrs[i]
    }

    pub(crate) fn edge_idx(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        self.degree(v) == 1
    }

    pub fn leaves(&self) -> Vec<Vertex> {
        self.ids
            .iter()
            .copied()
            .filter(|&v| self.degree(v) == 1)
            .collect()
    }

    /// Every message the graph admits: both orientations of every edge.
    pub fn all_messages(&self) -> Vec<Msg> {
        let mut out = Vec::with_capacity(2 * self.m());
        for (u, v) in self.edges() {
            out.push((u, v));
            out.push((v, u));
        }
        out.sort_unstable();
        out
    }

    /// BFS distances from `src` (dense indices), `usize::MAX` when unreachable.
    pub(crate) fn bfs_idx(&self, src: usize, removed: &[bool], skip_edge: Option<(usize, usize)>) -> Vec<usize> {
        let n = self.n();
        let mut dist = vec![usize::MAX; n];
        if removed.get(src).copied().unwrap_or(false) {
            return dist;
        }
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for &w in &self.nbrs[u] {
                if removed.get(w).copied().unwrap_or(false) {
                    continue;
                }
                if let Some((a, b)) = skip_edge {
                    if (u == a && w == b) || (u == b && w == a) {
                        continue;
                    }
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Hop distances from `src` to every vertex.
    pub fn distances(&self, src: Vertex) -> BTreeMap<Vertex, usize> {
        let Some(s) = self.index(src) else {
            return BTreeMap::new();
        };
        self.bfs_idx(s, &[], None)
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d != usize::MAX)
            .map(|(i, d)| (self.ids[i], d))
            .collect()
    }

    pub(crate) fn is_connected_without(&self, removed_vertices: &[usize], skip_edge: Option<(usize, usize)>) -> bool {
        let n = self.n();
        let mut removed = vec![false; n];
        for &r in removed_vertices {
            removed[r] = true;
        }
        let Some(start) = (0..n).find(|&i| !removed[i]) else {
            return true;
        };
        let dist = self.bfs_idx(start, &removed, skip_edge);
        (0..n).all(|i| removed[i] || dist[i] != usize::MAX)
    }

    /// The same graph with identifiers renamed by `map` (must be injective).
    pub fn relabel(&self, map: &BTreeMap<Vertex, Vertex>) -> Result<Graph, GraphError> {
        let vs: Vec<Vertex> = self
            .ids
            .iter()
            .map(|v| map.get(v).copied().ok_or(GraphError::UnknownVertex(*v)))
            .collect::<Result<_, _>>()?;
        let es: Vec<(Vertex, Vertex)> = self
            .edges()
            .into_iter()
            .map(|(u, v)| (map[&u], map[&v]))
            .collect();
        Graph::new(&vs, &es)
    }
}
