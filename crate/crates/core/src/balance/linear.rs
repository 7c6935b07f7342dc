//! Row bases for families of linear functionals over configuration indicators.

use crate::engine::{bits, Mask};

/// Mersenne prime `2^61 - 1`.
pub const P: u64 = (1 << 61) - 1;

fn reduce(x: u128) -> u64 {
    (x % P as u128) as u64
}

fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

fn inv(a: u64) -> u64 {
    // Fermat
    let mut base = a;
    let mut e = P - 2;
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    r
}

pub fn from_i64(w: i64) -> u64 {
    if w >= 0 {
        w as u64 % P
    } else {
        P - ((-w) as u64 % P)
    }
}

/// Basis of a span of integer rows, held modulo `P`.
///
/// Every original row has small integer entries, so for a 0/1 vector `x` the
/// value `row · x` is far below `P` in magnitude; vanishing modulo `P` is then
/// the same as vanishing over the integers, and the reduced basis annihilates
/// `x` exactly when every original row does.
#[derive(Clone, Debug, Default)]
pub struct ModBasis {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModBasis {
    pub fn new() -> ModBasis {
        ModBasis::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; returns true when it enlarged the span.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        for (pivot, r) in &self.rows {
            let c = row[*pivot];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(r) {
                    *x = reduce(*x as u128 + (P - mul(c, y)) as u128);
                }
            }
        }
        let Some(pivot) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv(row[pivot]);
        for x in row.iter_mut() {
            *x = mul(*x, s);
        }
        self.rows.push((pivot, row));
        true
    }

    pub fn annihilates(&self, x: Mask) -> bool {
        self.rows.iter().all(|(_, r)| {
            let mut acc: u128 = 0;
            for k in bits(x) {
                acc += r[k] as u128;
            }
            acc % P as u128 == 0
        })
    }
}

/// Basis of a span of rows over GF(2).
#[derive(Clone, Debug, Default)]
pub struct Gf2Basis {
    rows: Vec<Mask>,
}

impl Gf2Basis {
    pub fn new() -> Gf2Basis {
        Gf2Basis::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, mut v: Mask) -> Mask {
        for &r in &self.rows {
            let top = 127 - r.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    pub fn insert(&mut self, v: Mask) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        // leading bits stay distinct, so descending order keeps `reduce` valid
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    pub fn contains(&self, v: Mask) -> bool {
        self.reduce(v) == 0
    }

    pub fn rows(&self) -> &[Mask] {
        &self.rows
    }

    pub fn annihilates(&self, x: Mask) -> bool {
        self.rows.iter().all(|&r| (r & x).count_ones() % 2 == 0)
    }
}
