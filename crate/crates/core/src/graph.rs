//! Simple undirected graphs on at most 64 vertices, the graph6 codec, and
//! coalescence construction.
//!
//! Adjacency is one u64 bitset row per vertex. The graph6 short form covers
//! 0..=62 vertices; two extra slots of container headroom keep the encoder's
//! size check meaningful and give coalescence builds a little margin.

use std::fmt;

use crate::poly::Signature;

pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {v} out of range for graph on {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("duplicate vertex {v}")]
    DuplicateVertex { v: usize },
    #[error("path graph needs at least one vertex")]
    EmptyPath,
    #[error("selection has {vertices} vertices but signature has {entries} entries")]
    LengthMismatch { vertices: usize, entries: usize },
    #[error("coalescence would have {needed} vertices, more than the supported {MAX_VERTICES}")]
    TooManyVertices { needed: usize },
    #[error("rooted graph must have at least one vertex")]
    EmptyRootedGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("byte {byte:#04x} at position {pos} outside the graph6 range 63..=126")]
    ByteOutOfRange { pos: usize, byte: u8 },
    #[error("graph6 long form (leading '~') is not supported; only n <= 62")]
    LongForm,
    #[error("expected {expected} bytes for {n} vertices, got {got}")]
    BadLength {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("nonzero padding bit in final byte at position {pos}")]
    TrailingBits { pos: usize },
    #[error("cannot encode {n} vertices in graph6 short form (max 62)")]
    UnsupportedSize { n: usize },
}

/// Undirected simple graph; vertices are `0..n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    n: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n` vertices. Panics beyond the bitset capacity.
    pub fn new(n: usize) -> Graph {
        assert!(
            n <= MAX_VERTICES,
            "at most {MAX_VERTICES} vertices supported"
        );
        Graph {
            n,
            rows: vec![0; n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Path on `n >= 1` vertices with edges `i -- i+1`.
    pub fn path(n: usize) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyPath);
        }
        let mut g = Graph::new(n);
        for i in 0..n - 1 {
            g.add_edge(i, i + 1);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n && u != v, "bad edge ({u},{v})");
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.rows[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.rows[v];
        (0..self.n).filter(move |&u| row >> u & 1 == 1)
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components as sorted vertex lists, ordered by minimum vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = 0u64;
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << start;
            loop {
                let mut grown = comp;
                let mut rest = comp;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    grown |= self.rows[v];
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            seen |= comp;
            out.push((0..self.n).filter(|&v| comp >> v & 1 == 1).collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Induced subgraph after removing the vertices in `set`; survivors are
    /// relabeled preserving their order.
    pub fn delete_vertices(&self, set: &VertexSet) -> Result<Graph, GraphError> {
        let mut mask = 0u64;
        for &v in set.vertices() {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { v, n: self.n });
            }
            mask |= 1 << v;
        }
        Ok(self.delete_mask(mask))
    }

    /// Mask-based deletion used on hot paths; bits beyond `n` are ignored.
    pub fn delete_mask(&self, mask: u64) -> Graph {
        let keep: Vec<usize> = (0..self.n).filter(|&v| mask >> v & 1 == 0).collect();
        let mut g = Graph::new(keep.len());
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Relabels vertices: new label of `v` is `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph::new(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

/// Sorted set of distinct vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Accepts any order; sorts and rejects duplicates.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self, GraphError> {
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex { v: w[0] });
            }
        }
        Ok(VertexSet(vertices))
    }

    /// As [`VertexSet::new`], but also rejects vertices at or above `n`.
    pub fn bounded(n: usize, vertices: Vec<usize>) -> Result<Self, GraphError> {
        if let Some(&v) = vertices.iter().find(|&&v| v >= n) {
            return Err(GraphError::VertexOutOfRange { v, n });
        }
        VertexSet::new(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Graph with a distinguished root vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    graph: Graph,
    root: usize,
}

impl RootedGraph {
    pub fn new(graph: Graph, root: usize) -> Result<Self, GraphError> {
        if graph.n() == 0 {
            return Err(GraphError::EmptyRootedGraph);
        }
        if root >= graph.n() {
            return Err(GraphError::VertexOutOfRange {
                v: root,
                n: graph.n(),
            });
        }
        Ok(RootedGraph { graph, root })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// The rooted graph minus its root.
    pub fn without_root(&self) -> Graph {
        self.graph.delete_mask(1 << self.root)
    }
}

// ---- graph6 codec (short form) ----
//
// Byte 0 is n + 63. The upper triangle is read column-major as bits
// x(0,1), x(0,2), x(1,2), x(0,3), ... packed big-endian six to a byte,
// each byte offset by 63; the final byte is zero-padded.

pub fn graph6_decode(text: &str) -> Result<Graph, Graph6Error> {
    let bytes = text.trim_end_matches(['\n', '\r']).as_bytes();
    let Some(&first) = bytes.first() else {
        return Err(Graph6Error::Empty);
    };
    if first == b'~' {
        return Err(Graph6Error::LongForm);
    }
    if !(63..=126).contains(&first) {
        return Err(Graph6Error::ByteOutOfRange {
            pos: 0,
            byte: first,
        });
    }
    let n = (first - 63) as usize;
    let nbits = n * (n.saturating_sub(1)) / 2;
    let expected = 1 + nbits.div_ceil(6);
    if bytes.len() != expected {
        return Err(Graph6Error::BadLength {
            n,
            expected,
            got: bytes.len(),
        });
    }
    for (pos, &b) in bytes.iter().enumerate().skip(1) {
        if !(63..=126).contains(&b) {
            return Err(Graph6Error::ByteOutOfRange { pos, byte: b });
        }
    }
    let mut g = Graph::new(n);
    let mut bit = 0usize;
    for j in 1..n {
        for i in 0..j {
            let byte = bytes[1 + bit / 6] - 63;
            if byte >> (5 - bit % 6) & 1 == 1 {
                g.add_edge(i, j);
            }
            bit += 1;
        }
    }
    // Padding bits in the final byte must be zero.
    while bit < 6 * (expected - 1) {
        let byte = bytes[1 + bit / 6] - 63;
        if byte >> (5 - bit % 6) & 1 == 1 {
            return Err(Graph6Error::TrailingBits { pos: 1 + bit / 6 });
        }
        bit += 1;
    }
    Ok(g)
}

pub fn graph6_encode(g: &Graph) -> Result<String, Graph6Error> {
    let n = g.n();
    if n > 62 {
        return Err(Graph6Error::UnsupportedSize { n });
    }
    let mut out = vec![n as u8 + 63];
    let mut acc = 0u8;
    let mut used = 0u8;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | u8::from(g.has_edge(i, j));
            used += 1;
            if used == 6 {
                out.push(acc + 63);
                acc = 0;
                used = 0;
            }
        }
    }
    if used > 0 {
        out.push((acc << (6 - used)) + 63);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ascii"))
}

/// Attaches rooted copies of `g` to the host `t`: `sig.entries()[i]` copies
/// are coalesced at vertex `u[i]` (each copy's root is identified with
/// `u[i]`).
///
/// Vertex layout of the result: `t`'s vertices keep their labels, then the
/// copies of `g` minus its root follow in attachment order, each copy's
/// vertices in their original relative order.
pub fn build_coalescence(
    t: &Graph,
    u: &[usize],
    sig: &Signature,
    g: &RootedGraph,
) -> Result<Graph, GraphError> {
    if u.len() != sig.len() {
        return Err(GraphError::LengthMismatch {
            vertices: u.len(),
            entries: sig.len(),
        });
    }
    let mut seen = 0u64;
    for &v in u {
        if v >= t.n() {
            return Err(GraphError::VertexOutOfRange { v, n: t.n() });
        }
        if seen >> v & 1 == 1 {
            return Err(GraphError::DuplicateVertex { v });
        }
        seen |= 1 << v;
    }
    let copy_size = g.graph().n() - 1;
    let total = t.n() + sig.sum() as usize * copy_size;
    if total > MAX_VERTICES {
        return Err(GraphError::TooManyVertices { needed: total });
    }

    // Relabeling of g minus its root, order preserving.
    let kept: Vec<usize> = (0..g.graph().n()).filter(|&v| v != g.root()).collect();
    let root_adj: Vec<usize> = (0..copy_size)
        .filter(|&i| g.graph().has_edge(g.root(), kept[i]))
        .collect();
    let mut copy_edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..copy_size {
        for j in i + 1..copy_size {
            if g.graph().has_edge(kept[i], kept[j]) {
                copy_edges.push((i, j));
            }
        }
    }

    let mut out = Graph::new(total);
    for (a, b) in t.edges() {
        out.add_edge(a, b);
    }
    let mut base = t.n();
    for (pos, &a) in sig.entries().iter().enumerate() {
        for _ in 0..a {
            for &(i, j) in &copy_edges {
                out.add_edge(base + i, base + j);
            }
            for &i in &root_adj {
                out.add_edge(u[pos], base + i);
            }
            base += copy_size;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn graph6_known_strings() {
        let k2 = graph6_decode("A_").unwrap();
        assert_eq!(k2.n(), 2);
        assert!(k2.has_edge(0, 1));

        let e2 = graph6_decode("A?").unwrap();
        assert_eq!(e2.n(), 2);
        assert_eq!(e2.edge_count(), 0);

        let k3 = graph6_decode("Bw").unwrap();
        assert_eq!(k3, Graph::complete(3));

        assert_eq!(graph6_encode(&Graph::complete(3)).unwrap(), "Bw");
        assert_eq!(graph6_encode(&Graph::new(0)).unwrap(), "?");
        assert_eq!(graph6_decode("?").unwrap().n(), 0);
    }

    #[test]
    fn graph6_rejects_bad_input() {
        assert_eq!(graph6_decode(""), Err(Graph6Error::Empty));
        assert!(matches!(
            graph6_decode("A"),
            Err(Graph6Error::BadLength {
                n: 2,
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            graph6_decode("A\x20"),
            Err(Graph6Error::ByteOutOfRange { pos: 1, byte: 0x20 })
        ));
        assert!(matches!(graph6_decode("~??"), Err(Graph6Error::LongForm)));
        // n = 2 uses one payload bit; the remaining 5 must be zero.
        assert!(matches!(
            graph6_decode("AO"),
            Err(Graph6Error::TrailingBits { pos: 1 })
        ));
        let mut big = Graph::new(63);
        big.add_edge(0, 62);
        assert_eq!(
            graph6_encode(&big),
            Err(Graph6Error::UnsupportedSize { n: 63 })
        );
    }

    #[test]
    fn delete_vertices_examples() {
        let p3 = Graph::path(3).unwrap();
        let middle = p3
            .delete_vertices(&VertexSet::new(vec![1]).unwrap())
            .unwrap();
        assert_eq!(middle.n(), 2);
        assert_eq!(middle.edge_count(), 0);

        let k3 = Graph::complete(3);
        let minus0 = k3
            .delete_vertices(&VertexSet::new(vec![0]).unwrap())
            .unwrap();
        assert_eq!(minus0, Graph::complete(2));

        let same = k3
            .delete_vertices(&VertexSet::new(vec![]).unwrap())
            .unwrap();
        assert_eq!(same, k3);

        assert!(matches!(
            k3.delete_vertices(&VertexSet::new(vec![3]).unwrap()),
            Err(GraphError::VertexOutOfRange { v: 3, n: 3 })
        ));
        assert!(matches!(
            VertexSet::new(vec![1, 1]),
            Err(GraphError::DuplicateVertex { v: 1 })
        ));
    }

    #[test]
    fn path_and_components() {
        assert!(matches!(Graph::path(0), Err(GraphError::EmptyPath)));
        assert_eq!(Graph::path(1).unwrap().n(), 1);
        let p8 = Graph::path(8).unwrap();
        assert_eq!(p8.edge_count(), 7);
        assert!(p8.is_connected());

        let torn = p8.delete_mask(1 << 3);
        assert_eq!(torn.components(), vec![vec![0, 1, 2], vec![3, 4, 5, 6]]);
        assert!(!torn.is_connected());
    }

    #[test]
    fn coalescence_star_and_path() {
        // One copy of an edge rooted at an endpoint, attached at the middle
        // of a path, is the 3-star.
        let t = Graph::path(3).unwrap();
        let g = RootedGraph::new(Graph::path(2).unwrap(), 0).unwrap();
        let sig = Signature::new(vec![1]).unwrap();
        let built = build_coalescence(&t, &[1], &sig, &g).unwrap();
        assert_eq!(built.n(), 4);
        assert_eq!(built.edges(), vec![(0, 1), (1, 2), (1, 3)]);

        // Two copies of an edge at a single vertex form a path.
        let k1 = Graph::new(1);
        let sig2 = Signature::new(vec![2]).unwrap();
        let built2 = build_coalescence(&k1, &[0], &sig2, &g).unwrap();
        assert_eq!(built2.n(), 3);
        assert_eq!(built2.edges(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn coalescence_errors() {
        let t = Graph::path(3).unwrap();
        let g = RootedGraph::new(Graph::path(2).unwrap(), 0).unwrap();
        let sig = Signature::new(vec![1, 1]).unwrap();
        assert!(matches!(
            build_coalescence(&t, &[1, 1], &sig, &g),
            Err(GraphError::DuplicateVertex { v: 1 })
        ));
        assert!(matches!(
            build_coalescence(&t, &[1], &sig, &g),
            Err(GraphError::LengthMismatch {
                vertices: 1,
                entries: 2
            })
        ));
        let big = Signature::new(vec![62]).unwrap();
        assert!(matches!(
            build_coalescence(
                &t,
                &[0],
                &big,
                &RootedGraph::new(Graph::path(3).unwrap(), 0).unwrap(),
            ),
            Err(GraphError::TooManyVertices { .. })
        ));
    }

    #[test]
    fn coalescence_vertex_and_edge_counts() {
        let t = Graph::path(4).unwrap();
        let g = RootedGraph::new(Graph::complete(3), 1).unwrap();
        let sig = Signature::new(vec![2, 1]).unwrap();
        let built = build_coalescence(&t, &[0, 2], &sig, &g).unwrap();
        assert_eq!(built.n(), 4 + 3 * 2);
        assert_eq!(
            built.edge_count(),
            t.edge_count() + 3 * Graph::complete(3).edge_count()
        );
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (0usize..=9).prop_flat_map(|n| {
            prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(
                move |bits| {
                    let mut g = Graph::new(n);
                    let mut it = bits.into_iter();
                    for j in 1..n {
                        for i in 0..j {
                            if it.next().unwrap() {
                                g.add_edge(i, j);
                            }
                        }
                    }
                    g
                },
            )
        })
    }

    proptest! {
        #[test]
        fn graph6_round_trip(g in arb_graph()) {
            let text = graph6_encode(&g).unwrap();
            prop_assert_eq!(graph6_decode(&text).unwrap(), g);
        }

        #[test]
        fn deletion_drops_degrees(g in arb_graph(), pick in any::<u64>()) {
            prop_assume!(g.n() > 0);
            let v = (pick % g.n() as u64) as usize;
            let d = g.delete_mask(1 << v);
            prop_assert_eq!(d.n(), g.n() - 1);
            prop_assert_eq!(d.edge_count(), g.edge_count() - g.degree(v));
        }
    }
}
