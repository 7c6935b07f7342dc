//! Connected graphs up to isomorphism on few vertices.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use super::{Gadget, Graph, Vertex};

/// Largest vertex count the brute-force canonical form is used for.
pub const ATLAS_MAX: usize = 7;

static ATLAS: OnceLock<Vec<Vec<u32>>> = OnceLock::new();

fn pair_bit(n: usize, a: usize, b: usize) -> u32 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    // row-major upper triangle
    let idx = a * (2 * n - a - 1) / 2 + (b - a - 1);
    1 << idx
}

fn perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap(n, &mut p, &mut out);
    out
}

fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap(k - 1, p, out);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
}

fn canonical(n: usize, edges: &[(usize, usize)], perms: &[Vec<usize>]) -> u32 {
    perms
        .iter()
        .map(|p| edges.iter().fold(0, |m, &(a, b)| m | pair_bit(n, p[a], p[b])))
        .min()
        .unwrap()
}

fn decode(n: usize, mask: u32) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if mask & pair_bit(n, a, b) != 0 {
                e.push((a, b));
            }
        }
    }
    e
}

fn connected(n: usize, e: &[(usize, usize)]) -> bool {
    let mut seen = 1u32;
    loop {
        let mut grew = false;
        for &(a, b) in e {
            let (sa, sb) = (seen >> a & 1, seen >> b & 1);
            if sa != sb {
                seen |= (1 << a) | (1 << b);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    seen == (1 << n) - 1
}

fn build() -> Vec<Vec<u32>> {
    // level[n] holds canonical masks of connected graphs on n vertices
    let mut levels: Vec<Vec<u32>> = vec![Vec::new(), Vec::new(), vec![1]];
    for n in 3..=ATLAS_MAX {
        let ps = perms(n);
        let mut next = BTreeSet::new();
        for &mask in &levels[n - 1] {
            let base = decode(n - 1, mask);
            for attach in 1u32..(1 << (n - 1)) {
                let mut e = base.clone();
                for v in 0..n - 1 {
                    if attach >> v & 1 == 1 {
                        e.push((v, n - 1));
                    }
                }
                debug_assert!(connected(n, &e));
                next.insert(canonical(n, &e, &ps));
            }
        }
        levels.push(next.into_iter().collect());
    }
    levels
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices, `2 <= n <= 7`, with vertex identifiers `0..n`.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((2..=ATLAS_MAX).contains(&n), "atlas covers 2..=7 vertices");
    let levels = ATLAS.get_or_init(build);
    let vs: Vec<Vertex> = (0..n as Vertex).collect();
    levels[n]
        .iter()
        .map(|&m| {
            let e: Vec<(Vertex, Vertex)> = decode(n, m)
                .into_iter()
                .map(|(a, b)| (a as Vertex, b as Vertex))
                .collect();
            Graph::new(&vs, &e).expect("atlas graphs are connected")
        })
        .collect()
}

/// `count` seeded random connected graphs on `n` vertices (edge probability 1/2).
pub fn random_connected_sample(n: usize, count: usize, seed: u64) -> Vec<Graph> {
    (0..count as u64)
        .map(|i| {
            Gadget::RandomConnected { n, p: 0.5, seed: seed.wrapping_mul(1_000_003).wrapping_add(i) }
                .build()
                .expect("valid random gadget")
        })
        .collect()
}
