//! Structural questions about bridges, cut sets and odd-cycle paths.

use serde::{Deserialize, Serialize};

use super::{enumerate_cycles, enumerate_fecs, Graph, GraphError, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "query", rename_all = "snake_case")]
pub enum Query {
    IsBridge { u: Vertex, v: Vertex },
    IsCutSet { vertices: Vec<Vertex> },
    /// Strict reading: the edge is a connector edge of some FEC with `y >= 1`.
    OnOddCyclePath { u: Vertex, v: Vertex },
    /// Vertex reading that also admits the shared vertex of two odd cycles
    /// meeting in a single vertex.
    OnOddCycleJunction { v: Vertex },
    OnCycleOrFec { v: Vertex },
    Diameter,
    Eccentricity { v: Vertex },
    IsBipartite,
    SideHasOddCycle { u: Vertex, v: Vertex, endpoint: Vertex },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Bool(bool),
    Number(usize),
}

pub fn structural_query(g: &Graph, q: &Query) -> Result<Answer, GraphError> {
    Ok(match q {
        Query::IsBridge { u, v } => Answer::Bool(g.is_bridge(*u, *v)?),
        Query::IsCutSet { vertices } => Answer::Bool(g.is_cut_set(vertices)?),
        Query::OnOddCyclePath { u, v } => Answer::Bool(g.on_odd_cycle_path(*u, *v)?),
        Query::OnOddCycleJunction { v } => Answer::Bool(g.on_odd_cycle_junction(*v)?),
        Query::OnCycleOrFec { v } => Answer::Bool(g.on_cycle_or_fec(*v)?),
        Query::Diameter => Answer::Number(g.diameter()),
        Query::Eccentricity { v } => Answer::Number(g.eccentricity(*v)?),
        Query::IsBipartite => Answer::Bool(g.is_bipartite()),
        Query::SideHasOddCycle { u, v, endpoint } => Answer::Bool(g.side_has_odd_cycle(*u, *v, *endpoint)?),
    })
}

impl Graph {
    fn edge_indices(&self, u: Vertex, v: Vertex) -> Result<(usize, usize), GraphError> {
        if !self.has_edge(u, v) {
            return Err(GraphError::NoEdge(u, v));
        }
        Ok((self.index(u).unwrap(), self.index(v).unwrap()))
    }

    fn vertex_index(&self, v: Vertex) -> Result<usize, GraphError> {
        self.index(v).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn is_bridge(&self, u: Vertex, v: Vertex) -> Result<bool, GraphError> {
        let e = self.edge_indices(u, v)?;
        Ok(!self.is_connected_without(&[], Some(e)))
    }

    /// Removing the set leaves at least two vertices in separate components.
    pub fn is_cut_set(&self, vertices: &[Vertex]) -> Result<bool, GraphError> {
        let idx: Vec<usize> = vertices
            .iter()
            .map(|&v| self.vertex_index(v))
            .collect::<Result<_, _>>()?;
        Ok(!self.is_connected_without(&idx, None))
    }

    pub fn on_odd_cycle_path(&self, u: Vertex, v: Vertex) -> Result<bool, GraphError> {
        self.edge_indices(u, v)?;
        Ok(enumerate_fecs(self)
            .iter()
            .any(|f| f.path_edges().iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))))
    }

    pub fn on_odd_cycle_junction(&self, v: Vertex) -> Result<bool, GraphError> {
        self.vertex_index(v)?;
        Ok(enumerate_fecs(self).iter().any(|f| f.path.contains(&v)))
    }

    pub fn on_cycle_or_fec(&self, v: Vertex) -> Result<bool, GraphError> {
        self.vertex_index(v)?;
        if enumerate_cycles(self, self.n()).iter().any(|c| c.contains(v)) {
            return Ok(true);
        }
        Ok(enumerate_fecs(self).iter().any(|f| f.path.contains(&v)))
    }

    pub fn eccentricity(&self, v: Vertex) -> Result<usize, GraphError> {
        let i = self.vertex_index(v)?;
        Ok(self.bfs_idx(i, &[], None).into_iter().max().unwrap_or(0))
    }

    pub fn diameter(&self) -> usize {
        (0..self.n())
            .map(|i| self.bfs_idx(i, &[], None).into_iter().max().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn is_bipartite(&self) -> bool {
        self.two_colourable(0, None)
    }

    /// Two-colourability of the component containing `start` after deleting `skip`.
    fn two_colourable(&self, start: usize, skip: Option<(usize, usize)>) -> bool {
        let n = self.n();
        let mut colour = vec![u8::MAX; n];
        let mut stack = vec![start];
        colour[start] = 0;
        while let Some(u) = stack.pop() {
            for &w in self.nbr_idx(u) {
                if let Some((a, b)) = skip {
                    if (u, w) == (a, b) || (u, w) == (b, a) {
                        continue;
                    }
                }
                if colour[w] == u8::MAX {
                    colour[w] = 1 - colour[u];
                    stack.push(w);
                } else if colour[w] == colour[u] {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the component of `g - uv` containing `endpoint` has an odd cycle.
    pub fn side_has_odd_cycle(&self, u: Vertex, v: Vertex, endpoint: Vertex) -> Result<bool, GraphError> {
        let e = self.edge_indices(u, v)?;
        if endpoint != u && endpoint != v {
            return Err(GraphError::Param(format!("{endpoint} is not an endpoint of {u}-{v}")));
        }
        let s = self.index(endpoint).unwrap();
        Ok(!self.two_colourable(s, Some(e)))
    }
}
