//! Precomputed root tables for quadratic and cubic polynomials over
//! GF(2^m), replacing per-call exhaustive search inside the embedder.
//!
//! Table `q` stores one root y0 of y^2 + y + i for each i in [1, n];
//! the partner root is always y0 + 1. Table `c` stores the root triple
//! of y^3 + y + i for the rows that have three roots; `k` lists those
//! row indices. A general quadratic or cubic is reduced to the canonical
//! form by an affine substitution and answered from the tables.
//!
//! Absence is an explicit `None`, never an in-band marker: "no roots"
//! is a value, not an error. Every answer is substitution-verified
//! before it is returned; a failed check is an internal invariant
//! violation and panics.

use crate::galois::{Element, FieldTables};
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CubicRow {
    Empty,
    Single(Element),
    Triple([Element; 3]),
}

/// Lookup tables q (quadratic), c (cubic) and k (three-root row list).
#[derive(Debug, Clone)]
pub struct RootTables {
    n: usize,
    /// quad[i-1] = one root of y^2 + y + i, for i in 1..=n
    quad: Vec<Option<Element>>,
    /// cubic[i-1] = roots of y^3 + y + i, for i in 1..=n
    cubic: Vec<CubicRow>,
    three_root_rows: Vec<Element>,
}

impl RootTables {
    /// Exhaustive per-row root scan over the whole field.
    pub fn build(field: &FieldTables) -> Self {
        let n = field.n();
        let mut quad = Vec::with_capacity(n);
        let mut cubic = Vec::with_capacity(n);
        let mut three_root_rows = Vec::new();
        for i in 1..=n as Element {
            let q_roots: Vec<Element> =
                (0..=n as Element).filter(|&y| field.mul(y, y) ^ y ^ i == 0).collect();
            quad.push(q_roots.first().copied());

            let c_roots: Vec<Element> =
                (0..=n as Element).filter(|&y| field.pow(y, 3) ^ y ^ i == 0).collect();
            cubic.push(match c_roots.len() {
                0 => CubicRow::Empty,
                1 => CubicRow::Single(c_roots[0]),
                3 => {
                    three_root_rows.push(i);
                    CubicRow::Triple([c_roots[0], c_roots[1], c_roots[2]])
                }
                // a repeated root of y^3 + y + i needs y^2 = 1/3... impossible
                // away from i = 0 in char 2, so 2 distinct roots cannot occur
                other => unreachable!("cubic row {i} with {other} roots"),
            });
        }
        RootTables { n, quad, cubic, three_root_rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// One root of y^2 + y + i, for i in [1, n].
    pub fn quad_root(&self, i: Element) -> Option<Element> {
        self.quad[i as usize - 1]
    }

    /// The three roots of y^3 + y + i when that row has three, for i in [1, n].
    pub fn cubic_roots(&self, i: Element) -> Option<[Element; 3]> {
        match self.cubic[i as usize - 1] {
            CubicRow::Triple(r) => Some(r),
            _ => None,
        }
    }

    /// The single root of y^3 + y + i for one-root rows.
    fn cubic_single(&self, i: Element) -> Option<Element> {
        match self.cubic[i as usize - 1] {
            CubicRow::Single(r) => Some(r),
            _ => None,
        }
    }

    /// Indices of the cubic rows that hold three roots (table k).
    pub fn three_root_rows(&self) -> &[Element] {
        &self.three_root_rows
    }

    /// Debugging dump: one line per index with the stored roots.
    pub fn dump(&self, w: &mut impl Write) -> io::Result<()> {
        for i in 1..=self.n as Element {
            let q = match self.quad_root(i) {
                Some(y) => format!("{y}"),
                None => "-".into(),
            };
            let c = match self.cubic[i as usize - 1] {
                CubicRow::Empty => "-".into(),
                CubicRow::Single(y) => format!("{y}"),
                CubicRow::Triple([a, b, cr]) => format!("{a} {b} {cr}"),
            };
            writeln!(w, "{i}\tq: {q}\tc: {c}")?;
        }
        Ok(())
    }
}

fn verify_root(field: &FieldTables, s1: Element, s2: Element, x: Element) {
    let v = field.mul(x, x) ^ field.mul(s1, x) ^ s2;
    assert_eq!(v, 0, "lookup produced a non-root {x} for x^2 + {s1} x + {s2}");
}

fn verify_cubic_root(field: &FieldTables, s1: Element, s2: Element, s3: Element, x: Element) {
    let v = field.pow(x, 3) ^ field.mul(s1, field.mul(x, x)) ^ field.mul(s2, x) ^ s3;
    assert_eq!(v, 0, "lookup produced a non-root {x} for x^3 + {s1} x^2 + {s2} x + {s3}");
}

/// Roots of x^2 + s1 x + s2, answered from table q.
///
/// s1 = 0 degenerates to the Frobenius square root (one repeated root);
/// otherwise the substitution x = s1 y gives y^2 + y + s2/s1^2 and the
/// table row at that index.
pub fn solve_quadratic(
    field: &FieldTables,
    tables: &RootTables,
    s1: Element,
    s2: Element,
) -> Vec<Element> {
    let mut roots = if s1 == 0 {
        vec![field.sqrt(s2)]
    } else {
        let u = field.div(s2, field.mul(s1, s1)).expect("s1 nonzero");
        if u == 0 {
            vec![0, s1]
        } else {
            match tables.quad_root(u) {
                None => Vec::new(),
                Some(y0) => {
                    let x0 = field.mul(s1, y0);
                    vec![x0, x0 ^ s1]
                }
            }
        }
    };
    for &x in &roots {
        verify_root(field, s1, s2, x);
    }
    roots.sort_unstable();
    roots
}

/// Roots of x^3 + s1 x^2 + s2 x + s3, answered from table c.
///
/// With a = s1^2 + s2 and b = s1 s2 + s3, the substitution
/// x = a^(1/2) y + s1 gives y^3 + y + b/a^(3/2); a^(3/2) is computed as
/// a * sqrt(a), which is unique in characteristic 2 even when cube roots
/// are not. a = 0 degenerates to the pure cube (x + s1)^3 = b.
pub fn solve_cubic(
    field: &FieldTables,
    tables: &RootTables,
    s1: Element,
    s2: Element,
    s3: Element,
) -> Vec<Element> {
    let a = field.mul(s1, s1) ^ s2;
    let b = field.mul(s1, s2) ^ s3;
    let mut roots: Vec<Element> = if a == 0 {
        field.cbrt(b).into_iter().map(|z| z ^ s1).collect()
    } else if b == 0 {
        // y^3 + y = y (y + 1)^2: root set {0, 1}
        vec![s1, field.sqrt(a) ^ s1]
    } else {
        let a32 = field.mul(a, field.sqrt(a));
        let o = field.div(b, a32).expect("a nonzero");
        let sa = field.sqrt(a);
        match tables.cubic_roots(o) {
            Some(ys) => ys.iter().map(|&y| field.mul(sa, y) ^ s1).collect(),
            None => match tables.cubic_single(o) {
                Some(y) => vec![field.mul(sa, y) ^ s1],
                None => Vec::new(),
            },
        }
    };
    for &x in &roots {
        verify_cubic_root(field, s1, s2, s3, x);
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}
