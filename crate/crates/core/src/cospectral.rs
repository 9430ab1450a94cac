//! Cospectrality logic: Hosoya condition vectors, removal-cospectral set
//! testing, and grouping of graphs by characteristic polynomial.

use rayon::prelude::*;
use thiserror::Error;

use crate::charpoly::charpoly;
use crate::deletions::{accumulate_vector_bigint, DeletionCache};
use crate::graph::{Graph, GraphError, VertexSet};
use crate::poly::{IntPoly, PolyError, Signature};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CospectralError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("selection lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("specs have different signatures")]
    SignatureMismatch,
}

/// A multiple coalescence site: an underlying graph, an ordered tuple of
/// distinct attachment vertices, and the aligned copy counts.
///
/// Canonical form: within each maximal run of equal signature entries the
/// vertex labels are sorted ascending, so specs that differ only by
/// reordering positions of equal multiplicity compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoalescenceSpec {
    graph: Graph,
    vertices: Vec<usize>,
    signature: Signature,
}

impl CoalescenceSpec {
    pub fn new(
        graph: Graph,
        vertices: Vec<usize>,
        signature: Signature,
    ) -> Result<Self, CospectralError> {
        if vertices.len() != signature.len() {
            return Err(CospectralError::LengthMismatch {
                left: vertices.len(),
                right: signature.len(),
            });
        }
        VertexSet::bounded(graph.n(), vertices.clone())?;
        let mut vertices = vertices;
        for (start, len) in signature.blocks() {
            vertices[start..start + len].sort_unstable();
        }
        Ok(CoalescenceSpec {
            graph,
            vertices,
            signature,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }
}

/// The subset-cardinality aggregates of a spec: component `l` is
/// `sum over |I| = l of P(T - u_I) * prod_{j in I} a_j`, for l = 0..k.
///
/// Two specs with equal signatures produce cospectral coalescences for every
/// choice of attached rooted graph exactly when these vectors are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HosoyaVector {
    components: Vec<IntPoly>,
}

impl HosoyaVector {
    pub fn components(&self) -> &[IntPoly] {
        &self.components
    }
}

pub fn hosoya_vector(spec: &CoalescenceSpec) -> HosoyaVector {
    let mut cache = DeletionCache::new(spec.graph());
    HosoyaVector {
        components: accumulate_vector_bigint(
            &mut cache,
            spec.vertices(),
            spec.signature().entries(),
        ),
    }
}

/// Tests Schwenk's condition under the positional correspondence
/// `s1[i] -> s2[i]`: every subset removal must leave cospectral graphs.
pub fn is_removal_cospectral(
    t1: &Graph,
    s1: &[usize],
    t2: &Graph,
    s2: &[usize],
) -> Result<bool, CospectralError> {
    if s1.len() != s2.len() {
        return Err(CospectralError::LengthMismatch {
            left: s1.len(),
            right: s2.len(),
        });
    }
    VertexSet::bounded(t1.n(), s1.to_vec())?;
    VertexSet::bounded(t2.n(), s2.to_vec())?;
    let mut c1 = DeletionCache::new(t1);
    let mut c2 = DeletionCache::new(t2);
    let k = s1.len();
    for s in 0usize..1 << k {
        let mut m1 = 0u64;
        let mut m2 = 0u64;
        for pos in 0..k {
            if s >> pos & 1 == 1 {
                m1 |= 1 << s1[pos];
                m2 |= 1 << s2[pos];
            }
        }
        if c1.poly(m1).clone() != *c2.poly(m2) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether any bijection between the two selections that maps positions only
/// within equal-signature-entry blocks satisfies the removal-cospectral
/// condition. Such a correspondence makes the match an automatic CMC, so the
/// search treats the two specs as equivalent.
pub fn exists_removal_correspondence(
    spec1: &CoalescenceSpec,
    spec2: &CoalescenceSpec,
) -> Result<bool, CospectralError> {
    if spec1.signature() != spec2.signature() {
        return Err(CospectralError::SignatureMismatch);
    }
    let mut c1 = DeletionCache::new(spec1.graph());
    let mut c2 = DeletionCache::new(spec2.graph());
    if c1.poly(0).clone() != *c2.poly(0) {
        return Ok(false);
    }
    let k = spec1.k();
    let blocks = spec1.signature().blocks();
    // block_of[pos] = index into blocks
    let mut block_of = vec![0usize; k];
    for (b, &(start, len)) in blocks.iter().enumerate() {
        block_of[start..start + len].fill(b);
    }
    // assigned[d] = position in spec2 matched to position d of spec1
    let mut assigned: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    backtrack(
        spec1.vertices(),
        spec2.vertices(),
        &blocks,
        &block_of,
        &mut c1,
        &mut c2,
        &mut assigned,
        &mut used,
    )
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    v1: &[usize],
    v2: &[usize],
    blocks: &[(usize, usize)],
    block_of: &[usize],
    c1: &mut DeletionCache,
    c2: &mut DeletionCache,
    assigned: &mut Vec<usize>,
    used: &mut [bool],
) -> Result<bool, CospectralError> {
    let d = assigned.len();
    if d == v1.len() {
        return Ok(true);
    }
    let (start, len) = blocks[block_of[d]];
    for cand in start..start + len {
        if used[cand] {
            continue;
        }
        // All removal subsets containing position d must stay cospectral;
        // subsets not containing d were checked at shallower depths.
        let mut ok = true;
        for s in 0usize..1 << d {
            let mut m1 = 1u64 << v1[d];
            let mut m2 = 1u64 << v2[cand];
            for (pos, &a) in assigned.iter().enumerate() {
                if s >> pos & 1 == 1 {
                    m1 |= 1 << v1[pos];
                    m2 |= 1 << v2[a];
                }
            }
            if c1.poly(m1).clone() != *c2.poly(m2) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        assigned.push(cand);
        used[cand] = true;
        if backtrack(v1, v2, blocks, block_of, c1, c2, assigned, used)? {
            return Ok(true);
        }
        assigned.pop();
        used[cand] = false;
    }
    Ok(false)
}

/// Partition input indices by exact characteristic polynomial. Groups are
/// ordered by polynomial (degree, then descending coefficients); singletons
/// are kept, since one graph can host a match with two different selections.
pub fn group_cospectral(graphs: &[Graph]) -> Vec<Vec<usize>> {
    let mut keyed: Vec<(IntPoly, usize)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| (charpoly(g), i))
        .collect();
    keyed.sort();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<&IntPoly> = None;
    for (poly, idx) in &keyed {
        if last == Some(poly) {
            out.last_mut().unwrap().push(*idx);
        } else {
            out.push(vec![*idx]);
        }
        last = Some(poly);
    }
    out
}

/// A set of >= 2 specs sharing a signature and a HosoyaVector, i.e. a family
/// of cospectral multiple coalescences. Members are collapsed under
/// removal-correspondence equivalence; `removal_cospectral` records whether
/// any collapsing happened while the class was assembled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchClass {
    pub signature: Signature,
    pub vector: HosoyaVector,
    pub members: Vec<ClassMember>,
    pub removal_cospectral: bool,
}

/// One spec of a MatchClass, remembering which graph of the searched group
/// it lives on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassMember {
    pub graph_index: usize,
    pub spec: CoalescenceSpec,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::path_charpoly;
    use crate::coalescence::concrete_coalescence_charpoly;
    use crate::graph::RootedGraph;

    fn ones(k: usize) -> Signature {
        Signature::new(vec![1; k]).unwrap()
    }

    fn p8_pair() -> (CoalescenceSpec, CoalescenceSpec) {
        let p8 = Graph::path(8).unwrap();
        (
            CoalescenceSpec::new(p8.clone(), vec![0, 2, 3, 6], ones(4)).unwrap(),
            CoalescenceSpec::new(p8, vec![0, 3, 5, 6], ones(4)).unwrap(),
        )
    }

    #[test]
    fn canonical_form_sorts_within_blocks() {
        let p8 = Graph::path(8).unwrap();
        let spec = CoalescenceSpec::new(p8.clone(), vec![3, 0, 2, 6], ones(4)).unwrap();
        assert_eq!(spec.vertices(), &[0, 2, 3, 6]);
        // Distinct multiplicities pin their positions.
        let sig = Signature::new(vec![2, 1, 1]).unwrap();
        let spec = CoalescenceSpec::new(p8, vec![5, 4, 1], sig).unwrap();
        assert_eq!(spec.vertices(), &[5, 1, 4]);
    }

    #[test]
    fn spec_validation() {
        let p3 = Graph::path(3).unwrap();
        assert!(CoalescenceSpec::new(p3.clone(), vec![0, 0], ones(2)).is_err());
        assert!(CoalescenceSpec::new(p3.clone(), vec![0, 9], ones(2)).is_err());
        assert!(CoalescenceSpec::new(p3, vec![0], ones(2)).is_err());
    }

    #[test]
    fn vector_component_zero_is_the_charpoly() {
        let (s1, _) = p8_pair();
        let v = hosoya_vector(&s1);
        assert_eq!(v.components()[0], path_charpoly(8));
        assert_eq!(v.components().len(), 5);
    }

    #[test]
    fn vector_leading_coefficient_law() {
        let t = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 4)]);
        let sig = Signature::new(vec![3, 2, 2]).unwrap();
        let spec = CoalescenceSpec::new(t, vec![0, 2, 5], sig.clone()).unwrap();
        let v = hosoya_vector(&spec);
        for (l, comp) in v.components().iter().enumerate() {
            assert_eq!(comp.degree(), Some(6 - l));
            assert_eq!(comp.leading_coeff().unwrap(), &sig.elementary_symmetric(l));
        }
    }

    #[test]
    fn path8_pair_has_equal_vectors_but_no_correspondence() {
        let (s1, s2) = p8_pair();
        assert_eq!(hosoya_vector(&s1), hosoya_vector(&s2));
        assert!(
            !is_removal_cospectral(s1.graph(), s1.vertices(), s2.graph(), s2.vertices()).unwrap()
        );
        assert!(!exists_removal_correspondence(&s1, &s2).unwrap());
    }

    #[test]
    fn equal_vectors_give_cospectral_coalescences() {
        let (s1, s2) = p8_pair();
        let g = RootedGraph::new(Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]), 1).unwrap();
        let p1 =
            concrete_coalescence_charpoly(s1.graph(), s1.vertices(), s1.signature(), &g).unwrap();
        let p2 =
            concrete_coalescence_charpoly(s2.graph(), s2.vertices(), s2.signature(), &g).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn identity_correspondence_is_removal_cospectral() {
        let t = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(is_removal_cospectral(&t, &[0, 2], &t, &[0, 2]).unwrap());
        let spec = CoalescenceSpec::new(t, vec![0, 2], ones(2)).unwrap();
        assert!(exists_removal_correspondence(&spec, &spec).unwrap());
    }

    #[test]
    fn automorphic_selections_are_removal_cospectral() {
        // P4 reversal maps {0,1} to {3,2}.
        let p4 = Graph::path(4).unwrap();
        assert!(is_removal_cospectral(&p4, &[0, 1], &p4, &[3, 2]).unwrap());
        let s1 = CoalescenceSpec::new(p4.clone(), vec![0, 1], ones(2)).unwrap();
        let s2 = CoalescenceSpec::new(p4, vec![2, 3], ones(2)).unwrap();
        assert!(exists_removal_correspondence(&s1, &s2).unwrap());
        // Removal-cospectral specs share the vector.
        assert_eq!(hosoya_vector(&s1), hosoya_vector(&s2));
    }

    #[test]
    fn positional_order_matters_for_removal_test() {
        // P4: {0,1} -> {2,3} in that positional order pairs an endpoint with
        // an inner vertex, so the positional test fails even though the
        // block-respecting search succeeds.
        let p4 = Graph::path(4).unwrap();
        assert!(!is_removal_cospectral(&p4, &[0, 1], &p4, &[2, 3]).unwrap());
    }

    #[test]
    fn correspondence_respects_blocks() {
        // Signature (2,1) on P4: position 0 cannot be matched to position 1.
        // Selections (0, 1) and (2, 3): the reversal would need 0 -> 3, but
        // 0 and 3 sit in different blocks, so no correspondence exists.
        let p4 = Graph::path(4).unwrap();
        let sig = Signature::new(vec![2, 1]).unwrap();
        let s1 = CoalescenceSpec::new(p4.clone(), vec![0, 1], sig.clone()).unwrap();
        let s2 = CoalescenceSpec::new(p4.clone(), vec![2, 3], sig.clone()).unwrap();
        assert!(!exists_removal_correspondence(&s1, &s2).unwrap());
        // The reverse pairing lies within blocks and works.
        let s3 = CoalescenceSpec::new(p4, vec![3, 2], sig).unwrap();
        assert!(exists_removal_correspondence(&s1, &s3).unwrap());
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let p4 = Graph::path(4).unwrap();
        let s1 = CoalescenceSpec::new(p4.clone(), vec![0, 1], ones(2)).unwrap();
        let s2 = CoalescenceSpec::new(p4, vec![0, 1], Signature::new(vec![2, 1]).unwrap()).unwrap();
        assert_eq!(
            exists_removal_correspondence(&s1, &s2).unwrap_err(),
            CospectralError::SignatureMismatch
        );
        let g = Graph::path(3).unwrap();
        assert!(is_removal_cospectral(&g, &[0, 1], &g, &[0]).is_err());
    }

    #[test]
    fn grouping_finds_the_classic_pair() {
        // C4 + isolated vertex and the 4-star share x^5 - 4x^3.
        let c4_k1 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let p5 = Graph::path(5).unwrap();
        let groups = group_cospectral(&[c4_k1.clone(), p5, star]);
        assert!(groups.contains(&vec![0, 2]));
        assert_eq!(groups.iter().map(Vec::len).sum::<usize>(), 3);
        // Isomorphic graphs land together.
        let relabeled = c4_k1.permuted(&[4, 1, 0, 2, 3]);
        let groups = group_cospectral(&[c4_k1, relabeled]);
        assert_eq!(groups, vec![vec![0, 1]]);
    }
}
