//! Characteristic polynomials of coalescences.
//!
//! All routines work purely on polynomials where possible, so callers can
//! reuse cached vertex-deleted charpolys instead of rebuilding graphs.

use num_bigint::BigInt;
use thiserror::Error;

use crate::deletions::DeletionCache;
use crate::graph::{Graph, GraphError, RootedGraph, VertexSet};
use crate::poly::{IntPoly, PolyError, Signature};
use crate::sympoly::SymPoly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoalescenceError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("expected a vertex-deleted polynomial of degree {expected}, got degree {got:?}")]
    DegreeMismatch { expected: usize, got: Option<usize> },
    #[error("copy count must be at least 1")]
    ZeroCopies,
}

fn check_deleted_degree(whole: &IntPoly, deleted: &IntPoly) -> Result<(), CoalescenceError> {
    let n = whole.degree().ok_or(CoalescenceError::DegreeMismatch {
        expected: 1,
        got: None,
    })?;
    if n == 0 || deleted.degree() != Some(n - 1) {
        return Err(CoalescenceError::DegreeMismatch {
            expected: n.saturating_sub(1),
            got: deleted.degree(),
        });
    }
    Ok(())
}

/// Charpoly of the graph obtained by identifying the root of G with the root
/// of H, given the four charpolys PG, P(G-u), PH, P(H-v):
///
///   P = PG * P(H-v) + P(G-u) * PH - x * P(G-u) * P(H-v)
pub fn schwenk_coalescence(
    pg: &IntPoly,
    pgu: &IntPoly,
    ph: &IntPoly,
    phv: &IntPoly,
) -> Result<IntPoly, CoalescenceError> {
    check_deleted_degree(pg, pgu)?;
    check_deleted_degree(ph, phv)?;
    let x = IntPoly::x();
    Ok(pg.mul(phv).add(&pgu.mul(ph)).sub(&x.mul(&pgu.mul(phv))))
}

/// Charpoly of `a` copies of a rooted graph G identified at their roots:
///
///   P = [a * PG - (a-1) * x * P(G-r)] * P(G-r)^(a-1)
pub fn g_power_charpoly(pg: &IntPoly, pgr: &IntPoly, a: u32) -> Result<IntPoly, CoalescenceError> {
    if a == 0 {
        return Err(CoalescenceError::ZeroCopies);
    }
    check_deleted_degree(pg, pgr)?;
    let head = pg
        .scale_i64(a as i64)
        .sub(&IntPoly::x().mul(pgr).scale_i64(a as i64 - 1));
    Ok(head.mul(&pgr.pow(a - 1)))
}

fn validate_selection(t: &Graph, u: &[usize], sig: &Signature) -> Result<(), CoalescenceError> {
    if u.len() != sig.len() {
        return Err(PolyError::ArityMismatch {
            expected: sig.len(),
            got: u.len(),
        }
        .into());
    }
    VertexSet::bounded(t.n(), u.to_vec())?;
    Ok(())
}

/// Symbolic charpoly of the coalescence that attaches, at each selected
/// vertex u_i of T, `sig[i]` copies of one unspecified rooted graph G.
/// The result lives in Z[x, Q, R] where Q = PG - x * P(G-r) and R = P(G-r):
///
///   P = sum over subsets I of positions:
///         P(T - u_I) * prod_{i in I} sig[i] * Q^|I| * R^(sum(sig) - |I|)
pub fn hosoya_charpoly(
    t: &Graph,
    u: &[usize],
    sig: &Signature,
) -> Result<SymPoly, CoalescenceError> {
    validate_selection(t, u, sig)?;
    let k = u.len();
    let total = sig.sum() as u32;
    let mut cache = DeletionCache::new(t);
    let mut out = SymPoly::zero(3);
    for s in 0usize..1 << k {
        let l = s.count_ones() as usize;
        let mut mask = 0u64;
        let mut c = BigInt::from(1);
        for (pos, &v) in u.iter().enumerate() {
            if s >> pos & 1 == 1 {
                mask |= 1 << v;
                c *= sig.entries()[pos];
            }
        }
        let p = cache.poly(mask).clone();
        out.add_x_poly_qr(&p, &c, l as u32, total - l as u32);
    }
    Ok(out)
}

/// Fully symbolic variant with an independent unknown rooted graph G_i per
/// selected vertex, in Z[x, Q_1..Q_k, R_1..R_k]:
///
///   P = sum over subsets I:
///         P(T - u_I) * prod_{i in I} sig[i]
///           * prod_{i in I} Q_i * prod_m R_m^(sig[m] - [m in I])
pub fn hosoya_charpoly_multi(
    t: &Graph,
    u: &[usize],
    sig: &Signature,
) -> Result<SymPoly, CoalescenceError> {
    validate_selection(t, u, sig)?;
    let k = u.len();
    let mut cache = DeletionCache::new(t);
    let mut out = SymPoly::zero(1 + 2 * k);
    for s in 0usize..1 << k {
        let mut mask = 0u64;
        let mut c = BigInt::from(1);
        for (pos, &v) in u.iter().enumerate() {
            if s >> pos & 1 == 1 {
                mask |= 1 << v;
                c *= sig.entries()[pos];
            }
        }
        let p = cache.poly(mask);
        for (deg, coeff) in p.coeffs().iter().enumerate() {
            if coeff == &BigInt::ZERO {
                continue;
            }
            let mut exps = vec![0u32; 1 + 2 * k];
            exps[0] = deg as u32;
            for pos in 0..k {
                let chosen = s >> pos & 1 == 1;
                exps[1 + pos] = chosen as u32;
                exps[1 + k + pos] = sig.entries()[pos] - chosen as u32;
            }
            out.add_term(exps, coeff * &c);
        }
    }
    Ok(out)
}

/// Exact charpoly of the coalescence of T with a concrete rooted graph G,
/// evaluated through the symbolic form rather than the assembled graph.
pub fn concrete_coalescence_charpoly(
    t: &Graph,
    u: &[usize],
    sig: &Signature,
    g: &RootedGraph,
) -> Result<IntPoly, CoalescenceError> {
    let sym = hosoya_charpoly(t, u, sig)?;
    let pg = crate::charpoly::charpoly(g.graph());
    let pgr = crate::charpoly::charpoly(&g.without_root());
    let q = pg.sub(&IntPoly::x().mul(&pgr));
    Ok(sym.substitute(&[q], &[pgr])?)
}
