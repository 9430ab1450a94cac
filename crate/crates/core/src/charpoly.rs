//! Characteristic polynomials of adjacency matrices, exactly over the
//! integers.
//!
//! The general engine is the Samuelson-Berkowitz recursion, which is
//! division-free: the polynomial of each leading principal submatrix is
//! obtained from the previous one by a Toeplitz product whose column entries
//! are walk sums `R M^j C`. `charpoly` splits the graph into connected
//! components first (the polynomial of a disjoint union is the product) and
//! recognizes path components, which dominate deletion workloads, via the
//! path recurrence table.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::graph::Graph;
use crate::poly::IntPoly;

const PATH_TABLE_LEN: usize = 65;

/// Characteristic polynomials of paths P_0..P_64 via
/// `P_n = x P_{n-1} - P_{n-2}`, with `P_0 = 1`, `P_1 = x`.
fn path_table() -> &'static Vec<IntPoly> {
    static TABLE: OnceLock<Vec<IntPoly>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(PATH_TABLE_LEN);
        t.push(IntPoly::one());
        t.push(IntPoly::x());
        for n in 2..PATH_TABLE_LEN {
            let prev: &IntPoly = &t[n - 1];
            let next = prev.mul_xpow(1).sub(&t[n - 2]);
            t.push(next);
        }
        t
    })
}

/// Characteristic polynomial of the n-vertex path (n = 0 gives 1).
pub fn path_charpoly(n: usize) -> IntPoly {
    path_table()[n].clone()
}

pub(crate) fn path_charpoly_ref(n: usize) -> &'static IntPoly {
    &path_table()[n]
}

/// Samuelson-Berkowitz characteristic polynomial of the full adjacency
/// matrix, monic in `x`, with no component splitting. Exposed mainly so it
/// can be checked against independent oracles.
pub fn berkowitz(g: &Graph) -> IntPoly {
    let n = g.n();
    // Coefficients in descending degree; starts as the 0x0 polynomial 1.
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for r in 1..=n {
        // First column of the (r+1) x r Toeplitz transition matrix:
        // [1, -a_rr, -(R C), -(R M C), -(R M^2 C), ...] where M is the
        // leading (r-1) submatrix, R the new row, C the new column.
        let mut v: Vec<BigInt> = Vec::with_capacity(r + 1);
        v.push(BigInt::one());
        v.push(BigInt::zero()); // adjacency diagonal is zero
        if r >= 2 {
            let mut w: Vec<BigInt> = (0..r - 1)
                .map(|i| BigInt::from(u8::from(g.has_edge(i, r - 1))))
                .collect();
            for j in 2..=r {
                let mut dot = BigInt::zero();
                for (i, wi) in w.iter().enumerate() {
                    if g.has_edge(r - 1, i) {
                        dot += wi;
                    }
                }
                v.push(-dot);
                if j < r {
                    let mut next = vec![BigInt::zero(); r - 1];
                    for (row, slot) in next.iter_mut().enumerate() {
                        for (col, wc) in w.iter().enumerate() {
                            if g.has_edge(row, col) {
                                *slot += wc;
                            }
                        }
                    }
                    w = next;
                }
            }
        }
        let mut next = vec![BigInt::zero(); r + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, cj) in c.iter().enumerate().take(i + 1) {
                if i - j <= r {
                    *slot += &v[i - j] * cj;
                }
            }
        }
        c = next;
    }
    IntPoly::from_desc(c)
}

fn is_path_component(g: &Graph, comp: &[usize]) -> bool {
    let mut ends = 0;
    for &v in comp {
        match g.degree(v) {
            0 | 1 => ends += 1,
            2 => {}
            _ => return false,
        }
    }
    // A connected component with max degree 2 is a path iff it is acyclic,
    // i.e. it has a vertex of degree < 2.
    ends > 0
}

/// Characteristic polynomial of `g`'s adjacency matrix (empty graph: 1).
pub fn charpoly(g: &Graph) -> IntPoly {
    let comps = g.components();
    if comps.len() == 1 && !is_path_component(g, &comps[0]) {
        return berkowitz(g);
    }
    let mut acc = IntPoly::one();
    for comp in comps {
        if is_path_component(g, &comp) {
            acc = acc.mul(path_charpoly_ref(comp.len()));
        } else {
            let keep: u64 = comp.iter().fold(0u64, |m, &v| m | 1 << v);
            let full = (1u64 << g.n()) - 1;
            acc = acc.mul(&berkowitz(&g.delete_mask(full & !keep)));
        }
    }
    acc
}

/// `charpoly(g - v)` for every vertex `v`, in vertex order.
pub fn vertex_deleted_charpolys(g: &Graph) -> Vec<IntPoly> {
    (0..g.n())
        .map(|v| charpoly(&g.delete_mask(1 << v)))
        .collect()
}
