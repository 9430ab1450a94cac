//! Memoized characteristic polynomials of vertex-deleted subgraphs, keyed by
//! deletion bitmask. Labeled paths factor into gap products instead of
//! running the generic charpoly engine.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::charpoly::{charpoly, path_charpoly_ref};
use crate::graph::Graph;
use crate::poly::IntPoly;

/// True when the graph is literally the path 0-1-..-n-1, the common case for
/// deletion workloads; its deleted subgraphs factor into path gaps directly.
pub(crate) fn is_labeled_path(g: &Graph) -> bool {
    g.n() >= 1 && g.edge_count() == g.n() - 1 && (0..g.n() - 1).all(|i| g.has_edge(i, i + 1))
}

fn labeled_path_deletion(n: usize, mask: u64) -> IntPoly {
    let mut acc = IntPoly::one();
    let mut run = 0usize;
    for v in 0..n {
        if mask >> v & 1 == 1 {
            if run > 0 {
                acc = acc.mul(path_charpoly_ref(run));
                run = 0;
            }
        } else {
            run += 1;
        }
    }
    if run > 0 {
        acc = acc.mul(path_charpoly_ref(run));
    }
    acc
}

pub(crate) fn deletion_charpoly(g: &Graph, labeled_path: bool, mask: u64) -> IntPoly {
    if labeled_path {
        labeled_path_deletion(g.n(), mask)
    } else {
        charpoly(&g.delete_mask(mask))
    }
}

/// Exact per-graph cache.
pub struct DeletionCache<'g> {
    graph: &'g Graph,
    labeled_path: bool,
    memo: HashMap<u64, IntPoly>,
}

impl<'g> DeletionCache<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        DeletionCache {
            graph,
            labeled_path: is_labeled_path(graph),
            memo: HashMap::new(),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Characteristic polynomial of the graph minus the masked vertices.
    pub fn poly(&mut self, mask: u64) -> &IntPoly {
        let (graph, labeled) = (self.graph, self.labeled_path);
        self.memo
            .entry(mask)
            .or_insert_with(|| deletion_charpoly(graph, labeled, mask))
    }
}

/// Subset inclusion-exclusion accumulator: component `l` collects
/// `prod(entries over I) * charpoly(g - I)` over all position subsets `I`
/// of size `l`.
pub fn accumulate_vector_bigint(
    cache: &mut DeletionCache,
    sel: &[usize],
    entries: &[u32],
) -> Vec<IntPoly> {
    let n = cache.graph().n();
    let k = sel.len();
    let mut acc: Vec<Vec<BigInt>> = (0..=k).map(|l| vec![BigInt::ZERO; n - l + 1]).collect();
    for s in 0usize..1 << k {
        let l = s.count_ones() as usize;
        let mut mask = 0u64;
        let mut c = BigInt::from(1);
        for (pos, &v) in sel.iter().enumerate() {
            if s >> pos & 1 == 1 {
                mask |= 1 << v;
                c *= entries[pos];
            }
        }
        let p = cache.poly(mask);
        debug_assert_eq!(p.degree(), Some(n - l));
        for (slot, coeff) in acc[l].iter_mut().zip(p.coeffs()) {
            *slot += coeff * &c;
        }
    }
    acc.into_iter().map(IntPoly::from_coeffs).collect()
}
