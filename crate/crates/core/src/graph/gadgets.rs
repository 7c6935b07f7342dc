//! Named graph families.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, Vertex};

/// Gadget requests, parseable from `kind` or `kind:p1,p2,...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gadget {
    Path { n: usize },
    Cycle { n: usize },
    Star { leaves: usize },
    Complete { n: usize },
    CompleteBipartite { a: usize, b: usize },
    Paw,
    ExtendedPaw { tail: usize },
    Fec { x: usize, y: usize, z: usize },
    Diamond,
    HGraph,
    BinaryTreeStar { leaves: usize, tree_leaves: usize },
    RandomConnected { n: usize, p: f64, seed: u64 },
}

fn param_err(msg: impl Into<String>) -> GraphError {
    GraphError::Param(msg.into())
}

/// Builds a gadget from its kind name and numeric parameters.
pub fn generate(kind: &str, params: &[f64]) -> Result<Graph, GraphError> {
    Gadget::from_parts(kind, params)?.build()
}

impl Gadget {
    pub fn from_parts(kind: &str, params: &[f64]) -> Result<Gadget, GraphError> {
        let int = |i: usize| -> Result<usize, GraphError> {
            let v = *params
                .get(i)
                .ok_or_else(|| param_err(format!("{kind}: missing parameter {}", i + 1)))?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(param_err(format!("{kind}: parameter {} must be a non-negative integer", i + 1)));
            }
            Ok(v as usize)
        };
        let arity = |k: usize| -> Result<(), GraphError> {
            if params.len() == k {
                Ok(())
            } else {
                Err(param_err(format!("{kind}: expected {k} parameters, got {}", params.len())))
            }
        };
        let g = match kind {
            "path" => {
                arity(1)?;
                Gadget::Path { n: int(0)? }
            }
            "cycle" => {
                arity(1)?;
                Gadget::Cycle { n: int(0)? }
            }
            "star" => {
                arity(1)?;
                Gadget::Star { leaves: int(0)? }
            }
            "complete" => {
                arity(1)?;
                Gadget::Complete { n: int(0)? }
            }
            "complete_bipartite" => {
                arity(2)?;
                Gadget::CompleteBipartite { a: int(0)?, b: int(1)? }
            }
            "paw" => {
                arity(0)?;
                Gadget::Paw
            }
            "extended_paw" => {
                arity(1)?;
                Gadget::ExtendedPaw { tail: int(0)? }
            }
            "fec" => {
                arity(3)?;
                Gadget::Fec { x: int(0)?, y: int(1)?, z: int(2)? }
            }
            "diamond" => {
                arity(0)?;
                Gadget::Diamond
            }
            "h_graph" => {
                arity(0)?;
                Gadget::HGraph
            }
            "binary_tree_star" => {
                arity(2)?;
                Gadget::BinaryTreeStar { leaves: int(0)?, tree_leaves: int(1)? }
            }
            "random_connected" => {
                arity(3)?;
                let p = params[1];
                if !(0.0..=1.0).contains(&p) {
                    return Err(param_err("random_connected: edge probability must lie in [0,1]"));
                }
                Gadget::RandomConnected { n: int(0)?, p, seed: int(2)? as u64 }
            }
            other => return Err(param_err(format!("unknown gadget kind {other:?}"))),
        };
        Ok(g)
    }

    pub fn build(&self) -> Result<Graph, GraphError> {
        let (n, edges) = self.edge_list()?;
        let vs: Vec<Vertex> = (0..n as Vertex).collect();
        Graph::new(&vs, &edges)
    }

    fn edge_list(&self) -> Result<(usize, Vec<(Vertex, Vertex)>), GraphError> {
        let mut e = Vec::new();
        let n = match *self {
            Gadget::Path { n } => {
                if n < 2 {
                    return Err(param_err("path needs at least 2 vertices"));
                }
                for i in 1..n {
                    e.push((i as Vertex - 1, i as Vertex));
                }
                n
            }
            Gadget::Cycle { n } => {
                if n < 3 {
                    return Err(param_err("cycle length must be at least 3"));
                }
                push_cycle(&mut e, &(0..n as Vertex).collect::<Vec<_>>());
                n
            }
            Gadget::Star { leaves } => {
                if leaves < 1 {
                    return Err(param_err("star needs at least one leaf"));
                }
                for l in 1..=leaves {
                    e.push((0, l as Vertex));
                }
                leaves + 1
            }
            Gadget::Complete { n } => {
                if n < 2 {
                    return Err(param_err("complete graph needs at least 2 vertices"));
                }
                for a in 0..n as Vertex {
                    for b in a + 1..n as Vertex {
                        e.push((a, b));
                    }
                }
                n
            }
            Gadget::CompleteBipartite { a, b } => {
                if a < 1 || b < 1 {
                    return Err(param_err("complete_bipartite sides must be non-empty"));
                }
                for i in 0..a {
                    for j in 0..b {
                        e.push((i as Vertex, (a + j) as Vertex));
                    }
                }
                a + b
            }
            Gadget::Paw => return Gadget::ExtendedPaw { tail: 1 }.edge_list(),
            Gadget::ExtendedPaw { tail } => {
                if tail < 1 {
                    return Err(param_err("extended_paw tail must have at least one vertex"));
                }
                push_cycle(&mut e, &[0, 1, 2]);
                let mut prev = 2;
                for i in 0..tail {
                    let v = 3 + i as Vertex;
                    e.push((prev, v));
                    prev = v;
                }
                3 + tail
            }
            Gadget::Fec { x, y, z } => {
                if x < 1 || z < 1 {
                    return Err(param_err("fec cycle half-lengths x and z must be at least 1"));
                }
                let a: Vec<Vertex> = (0..(2 * x + 1) as Vertex).collect();
                push_cycle(&mut e, &a);
                let mut next = a.len() as Vertex;
                let c0 = if y == 0 {
                    0
                } else {
                    let mut prev = 0;
                    for _ in 1..y {
                        e.push((prev, next));
                        prev = next;
                        next += 1;
                    }
                    let c0 = next;
                    next += 1;
                    e.push((prev, c0));
                    c0
                };
                let mut c = vec![c0];
                for _ in 0..2 * z {
                    c.push(next);
                    next += 1;
                }
                push_cycle(&mut e, &c);
                next as usize
            }
            Gadget::Diamond => {
                e.extend([(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]);
                4
            }
            Gadget::HGraph => {
                e.extend([(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]);
                6
            }
            Gadget::BinaryTreeStar { leaves, tree_leaves } => {
                if leaves < 1 || tree_leaves < 1 || tree_leaves > leaves {
                    return Err(param_err("binary_tree_star needs 1 <= tree_leaves <= leaves"));
                }
                for l in 1..=leaves {
                    e.push((0, l as Vertex));
                }
                let mut next = leaves as Vertex + 1;
                let mut level: Vec<Vertex> = (1..=tree_leaves as Vertex).collect();
                while level.len() > 1 {
                    let mut up = Vec::new();
                    for pair in level.chunks(2) {
                        let p = next;
                        next += 1;
                        for &ch in pair {
                            e.push((ch, p));
                        }
                        up.push(p);
                    }
                    level = up;
                }
                let root = level[0];
                let t = [next, next + 1, next + 2];
                next += 3;
                e.push((root, t[0]));
                push_cycle(&mut e, &t);
                e.push((t[1], next));
                next as usize + 1
            }
            Gadget::RandomConnected { n, p, seed } => {
                if n < 2 {
                    return Err(param_err("random_connected needs at least 2 vertices"));
                }
                if p <= 0.0 {
                    return Err(param_err("random_connected needs positive edge probability"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                loop {
                    let mut cand = Vec::new();
                    for a in 0..n as Vertex {
                        for b in a + 1..n as Vertex {
                            if rng.gen_bool(p) {
                                cand.push((a, b));
                            }
                        }
                    }
                    let vs: Vec<Vertex> = (0..n as Vertex).collect();
                    if Graph::new(&vs, &cand).is_ok() {
                        return Ok((n, cand));
                    }
                }
            }
        };
        Ok((n, e))
    }
}

fn push_cycle(e: &mut Vec<(Vertex, Vertex)>, vs: &[Vertex]) {
    for i in 0..vs.len() {
        e.push((vs[i], vs[(i + 1) % vs.len()]));
    }
}

impl FromStr for Gadget {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Gadget, GraphError> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim(), r.trim()),
            None => (s.trim(), ""),
        };
        let params = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| param_err(format!("bad parameter {p:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        Gadget::from_parts(kind, &params)
    }
}

impl fmt::Display for Gadget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gadget::Path { n } => write!(f, "path:{n}"),
            Gadget::Cycle { n } => write!(f, "cycle:{n}"),
            Gadget::Star { leaves } => write!(f, "star:{leaves}"),
            Gadget::Complete { n } => write!(f, "complete:{n}"),
            Gadget::CompleteBipartite { a, b } => write!(f, "complete_bipartite:{a},{b}"),
            Gadget::Paw => write!(f, "paw"),
            Gadget::ExtendedPaw { tail } => write!(f, "extended_paw:{tail}"),
            Gadget::Fec { x, y, z } => write!(f, "fec:{x},{y},{z}"),
            Gadget::Diamond => write!(f, "diamond"),
            Gadget::HGraph => write!(f, "h_graph"),
            Gadget::BinaryTreeStar { leaves, tree_leaves } => write!(f, "binary_tree_star:{leaves},{tree_leaves}"),
            Gadget::RandomConnected { n, p, seed } => write!(f, "random_connected:{n},{p},{seed}"),
        }
    }
}
