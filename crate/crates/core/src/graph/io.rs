//! Edge-list and JSON graph formats, plus DOT export.
//!
//! All writers emit vertices ascending and edges lexicographically, so equal
//! graphs serialise to identical bytes.

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, Msg, Vertex};

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
}

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| {
            t.parse::<Vertex>()
                .map_err(|_| GraphError::Parse(format!("line {}: bad vertex {t:?}", lineno + 1)))
        };
        match toks.as_slice() {
            [v] => vertices.push(num(v)?),
            [u, v] => {
                let (u, v) = (num(u)?, num(v)?);
                vertices.extend([u, v]);
                edges.push((u, v));
            }
            _ => {
                return Err(GraphError::Parse(format!(
                    "line {}: expected `u v` or a lone vertex",
                    lineno + 1
                )))
            }
        }
    }
    vertices.sort_unstable();
    vertices.dedup();
    Graph::new(&vertices, &edges)
}

pub fn to_edge_list(g: &Graph) -> String {
    let mut s = format!("# n={} m={}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn parse_json(text: &str) -> Result<Graph, GraphError> {
    let j: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
    Graph::new(&j.vertices, &j.edges)
}

pub fn to_json(g: &Graph) -> String {
    serde_json::to_string(&GraphJson {
        vertices: g.vertices().to_vec(),
        edges: g.edges(),
    })
    .expect("graph json")
}

/// Reads either format, choosing JSON when the text starts with `{`.
pub fn parse_any(text: &str) -> Result<Graph, GraphError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}

/// DOT rendering; `highlight` messages are drawn as red directed overlays.
pub fn to_dot(g: &Graph, name: &str, highlight: &[Msg]) -> String {
    let mut s = format!("digraph \"{name}\" {{\n  edge [dir=none];\n");
    for v in g.vertices() {
        s.push_str(&format!("  {v};\n"));
    }
    for (u, v) in g.edges() {
        s.push_str(&format!("  {u} -> {v};\n"));
    }
    let mut h = highlight.to_vec();
    h.sort_unstable();
    for (u, v) in h {
        s.push_str(&format!("  {u} -> {v} [dir=forward, color=red, constraint=false];\n"));
    }
    s.push_str("}\n");
    s
}

impl serde::Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson { vertices: self.vertices().to_vec(), edges: self.edges() }.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Graph, D::Error> {
        let j = GraphJson::deserialize(d)?;
        Graph::new(&j.vertices, &j.edges).map_err(serde::de::Error::custom)
    }
}
