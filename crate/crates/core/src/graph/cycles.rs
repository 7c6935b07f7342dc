//! Simple cycles and faux-even cycles (two odd cycles joined by a path).

use serde::{Deserialize, Serialize};

use super::{Graph, Msg, Vertex};

/// A simple cycle stored once, oriented from its minimum vertex towards the
/// smaller of that vertex's two cycle neighbours. The stored direction is
/// called clockwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cycle {
    pub vertices: Vec<Vertex>,
}

impl Cycle {
    /// Canonicalises an arbitrary closed vertex sequence.
    pub fn canonical(seq: &[Vertex]) -> Cycle {
        let k = seq.len();
        let (p, _) = seq.iter().enumerate().min_by_key(|&(_, v)| *v).unwrap();
        let next = seq[(p + 1) % k];
        let prev = seq[(p + k - 1) % k];
        let vertices = if next < prev {
            (0..k).map(|i| seq[(p + i) % k]).collect()
        } else {
            (0..k).map(|i| seq[(p + k - i) % k]).collect()
        };
        Cycle { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.len() % 2 == 1
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    /// Clockwise arcs `(v_i, v_{i+1})`.
    pub fn clockwise(&self) -> Vec<Msg> {
        let k = self.len();
        (0..k)
            .map(|i| (self.vertices[i], self.vertices[(i + 1) % k]))
            .collect()
    }

    /// Whether the undirected edge `uv` is a cycle edge.
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.clockwise()
            .iter()
            .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    /// The same cycle rotated to start at `v`, keeping the stored direction.
    pub fn rotated_to(&self, v: Vertex) -> Vec<Vertex> {
        let k = self.len();
        let p = self.vertices.iter().position(|&w| w == v).expect("vertex on cycle");
        (0..k).map(|i| self.vertices[(p + i) % k]).collect()
    }
}

/// Two odd cycles joined by a connector path.
///
/// `a` and `c` are the cycles rotated to start at the connector endpoints
/// `a_0` and `c_0`, in their stored direction. `path` runs `a_0, b_1, ...,
/// b_{y-1}, c_0`; when `y = 0` it is the single shared vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fec {
    pub cycle_a: Cycle,
    pub cycle_c: Cycle,
    pub a: Vec<Vertex>,
    pub c: Vec<Vertex>,
    pub path: Vec<Vertex>,
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Fec {
    /// Internal connector vertices `b_1 .. b_{y-1}`.
    pub fn connector(&self) -> &[Vertex] {
        if self.path.len() <= 2 {
            &[]
        } else {
            &self.path[1..self.path.len() - 1]
        }
    }

    /// Connector edges as unordered pairs in path order.
    pub fn path_edges(&self) -> Vec<(Vertex, Vertex)> {
        self.path.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self
            .a
            .iter()
            .chain(self.c.iter())
            .chain(self.path.iter())
            .copied()
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Every undirected edge of the subgraph.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut e: Vec<(Vertex, Vertex)> = self
            .cycle_a
            .clockwise()
            .into_iter()
            .chain(self.cycle_c.clockwise())
            .chain(self.path_edges())
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges().contains(&key)
    }
}

/// Every simple cycle of length at most `max_len`, each exactly once.
pub fn enumerate_cycles(g: &Graph, max_len: usize) -> Vec<Cycle> {
    let n = g.n();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(n);
    let mut on_path = vec![false; n];
    for s in 0..n {
        path.clear();
        path.push(s);
        on_path[s] = true;
        extend(g, s, max_len, &mut path, &mut on_path, &mut out);
        on_path[s] = false;
    }
    out.sort();
    out
}

fn extend(g: &Graph, s: usize, max_len: usize, path: &mut Vec<usize>, on_path: &mut [bool], out: &mut Vec<Cycle>) {
    let u = *path.last().unwrap();
    for &w in g.nbr_idx(u) {
        if w == s {
            // record each cycle in one direction only
            if path.len() >= 3 && path[1] < path[path.len() - 1] {
                out.push(Cycle {
                    vertices: path.iter().map(|&i| g.id(i)).collect(),
                });
            }
        } else if w > s && !on_path[w] && path.len() < max_len {
            on_path[w] = true;
            path.push(w);
            extend(g, s, max_len, path, on_path, out);
            path.pop();
            on_path[w] = false;
        }
    }
}

/// Every FEC subgraph of `g`, each once up to swapping the two cycles.
pub fn enumerate_fecs(g: &Graph) -> Vec<Fec> {
    let odd: Vec<Cycle> = enumerate_cycles(g, g.n())
        .into_iter()
        .filter(Cycle::is_odd)
        .collect();
    let mut out = Vec::new();
    for i in 0..odd.len() {
        for j in (i + 1)..odd.len() {
            let (ca, cc) = (&odd[i], &odd[j]);
            let shared: Vec<Vertex> = ca.vertices.iter().copied().filter(|&v| cc.contains(v)).collect();
            match shared.len() {
                1 => out.push(make_fec(ca, cc, vec![shared[0]])),
                0 => {
                    for p in connecting_paths(g, ca, cc) {
                        out.push(make_fec(ca, cc, p));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

fn make_fec(ca: &Cycle, cc: &Cycle, path: Vec<Vertex>) -> Fec {
    let a0 = path[0];
    let c0 = *path.last().unwrap();
    Fec {
        x: (ca.len() - 1) / 2,
        z: (cc.len() - 1) / 2,
        y: path.len() - 1,
        a: ca.rotated_to(a0),
        c: cc.rotated_to(c0),
        cycle_a: ca.clone(),
        cycle_c: cc.clone(),
        path,
    }
}

/// Simple paths from a vertex of `ca` to a vertex of `cc` whose internal
/// vertices avoid both cycles.
fn connecting_paths(g: &Graph, ca: &Cycle, cc: &Cycle) -> Vec<Vec<Vertex>> {
    let n = g.n();
    let mut blocked = vec![false; n];
    let mut target = vec![false; n];
    for &v in &ca.vertices {
        blocked[g.index(v).unwrap()] = true;
    }
    for &v in &cc.vertices {
        let i = g.index(v).unwrap();
        blocked[i] = true;
        target[i] = true;
    }
    let mut out = Vec::new();
    for &a in &ca.vertices {
        let s = g.index(a).unwrap();
        let mut path = vec![s];
        let mut on = vec![false; n];
        on[s] = true;
        walk(g, &blocked, &target, &mut path, &mut on, &mut out);
    }
    out
}

fn walk(g: &Graph, blocked: &[bool], target: &[bool], path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<Vertex>>) {
    let u = *path.last().unwrap();
    for &w in g.nbr_idx(u) {
        if target[w] {
            let mut p: Vec<Vertex> = path.iter().map(|&i| g.id(i)).collect();
            p.push(g.id(w));
            out.push(p);
        } else if !blocked[w] && !on[w] {
            on[w] = true;
            path.push(w);
            walk(g, blocked, target, path, on, out);
            path.pop();
            on[w] = false;
        }
    }
}
