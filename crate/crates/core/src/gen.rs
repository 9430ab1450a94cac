//! Exhaustive generation of small graphs up to isomorphism.
//!
//! Everything here is brute force over vertex permutations, which is fine
//! through n = 7 (and n = 8 for one-off isomorphism checks in tests). The
//! canonical form of a graph is the minimum upper-triangle edge bitmask over
//! all relabelings.

// Triangular loops over the pair-index table read better with indices.
#![allow(clippy::needless_range_loop)]

use std::collections::HashSet;

use itertools::Itertools;
use rayon::prelude::*;

use crate::graph::{Graph, GraphError};

const MAX_BRUTE_FORCE: usize = 8;

/// Upper-triangle bitmask with bit `index(i,j)` set per edge; usable while
/// `n*(n-1)/2 <= 64`.
fn edge_mask(g: &Graph) -> u64 {
    let mut mask = 0u64;
    let mut bit = 0;
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            if g.has_edge(i, j) {
                mask |= 1 << bit;
            }
            bit += 1;
        }
    }
    mask
}

fn pair_index(n: usize) -> Vec<Vec<usize>> {
    let mut idx = vec![vec![0; n]; n];
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            idx[i][j] = bit;
            idx[j][i] = bit;
            bit += 1;
        }
    }
    idx
}

fn permuted_mask(mask: u64, n: usize, perm: &[usize], idx: &[Vec<usize>]) -> u64 {
    let mut out = 0u64;
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                out |= 1 << idx[perm[i]][perm[j]];
            }
            bit += 1;
        }
    }
    out
}

/// Canonical edge mask: minimum over all vertex permutations.
pub fn canonical_mask(g: &Graph) -> u64 {
    let n = g.n();
    assert!(
        n <= MAX_BRUTE_FORCE,
        "brute-force canonical form is for n <= {MAX_BRUTE_FORCE}"
    );
    let idx = pair_index(n);
    let mask = edge_mask(g);
    (0..n)
        .permutations(n)
        .map(|perm| permuted_mask(mask, n, &perm, &idx))
        .min()
        .unwrap_or(0)
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.n() == b.n() && canonical_mask(a) == canonical_mask(b)
}

/// All automorphisms of `g` (brute force, n <= 8).
pub fn automorphisms(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    assert!(n <= MAX_BRUTE_FORCE);
    let idx = pair_index(n);
    let mask = edge_mask(g);
    (0..n)
        .permutations(n)
        .filter(|perm| permuted_mask(mask, n, perm, &idx) == mask)
        .collect()
}

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut g = Graph::new(n);
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                g.add_edge(i, j);
            }
            bit += 1;
        }
    }
    g
}

/// One representative per isomorphism class of all graphs on `n` vertices,
/// built by augmenting the classes on `n - 1` vertices with every possible
/// neighborhood for a new vertex.
fn all_graphs_up_to_iso(n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![0];
    }
    let prev = all_graphs_up_to_iso(n - 1);
    let idx = pair_index(n);
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let base_bits = (n - 1) * n.saturating_sub(2) / 2;
    let mut candidates: HashSet<u64> = HashSet::new();
    for &small in &prev {
        // New vertex n-1 adjacency: columns (i, n-1) occupy the top bits in
        // row-major pair order; reindex explicitly to stay layout-agnostic.
        for nbhd in 0u64..1 << (n - 1) {
            let mut mask = 0u64;
            // copy the old edges into the n-vertex pair layout
            let mut bit = 0;
            for i in 0..n - 1 {
                for j in i + 1..n - 1 {
                    if small >> bit & 1 == 1 {
                        mask |= 1 << idx[i][j];
                    }
                    bit += 1;
                }
            }
            debug_assert_eq!(bit, base_bits);
            for i in 0..n - 1 {
                if nbhd >> i & 1 == 1 {
                    mask |= 1 << idx[i][n - 1];
                }
            }
            candidates.insert(mask);
        }
    }
    let mut canon: Vec<u64> = candidates
        .into_par_iter()
        .map(|mask| {
            perms
                .iter()
                .map(|perm| permuted_mask(mask, n, perm, &idx))
                .min()
                .unwrap()
        })
        .collect();
    canon.sort_unstable();
    canon.dedup();
    canon
}

/// One representative per isomorphism class of all graphs on `n` vertices,
/// for `n <= 7`. Deterministic order (by canonical edge mask).
pub fn small_graphs(n: usize) -> Result<Vec<Graph>, GraphError> {
    if n == 0 || n > 7 {
        return Err(GraphError::VertexOutOfRange { v: n, n: 8 });
    }
    Ok(all_graphs_up_to_iso(n)
        .into_iter()
        .map(|mask| graph_from_mask(n, mask))
        .collect())
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices, for `n <= 7`. Deterministic order (by canonical edge mask).
pub fn small_connected_graphs(n: usize) -> Result<Vec<Graph>, GraphError> {
    Ok(small_graphs(n)?
        .into_iter()
        .filter(Graph::is_connected)
        .collect())
}

/// All trees on `n` vertices up to isomorphism (`n <= 7`).
pub fn small_trees(n: usize) -> Result<Vec<Graph>, GraphError> {
    Ok(small_connected_graphs(n)?
        .into_iter()
        .filter(|g| g.edge_count() == n - 1)
        .collect())
}
