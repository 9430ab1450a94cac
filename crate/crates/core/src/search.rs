//! Exhaustive search for cospectral multiple coalescences over a group of
//! cospectral graphs.
//!
//! Canonical specs are walked as pairs (S, f): an ascending vertex subset S
//! and a multiplicity assignment f on S with gcd 1. Ordering S by descending
//! multiplicity, ties by ascending label, recovers the canonical selection
//! of a normalized signature, so the walk covers the same space as
//! `enumerate_signatures`/`enumerate_selections` with no repeats. The outer
//! walk over subsets maintains vertex-deleted characteristic polynomial
//! evaluations, at two fixed points modulo a Mersenne prime, for every
//! subset of the current S; the inner walk over multiplicities folds them
//! into the HosoyaVector fingerprint through a graded partial-sum transform
//! costing O(|S|) modular operations per assignment. Fingerprint buckets are
//! confirmed with exact BigInt vectors, so hashing cannot create false
//! matches, and equal vectors always share a fingerprint, so it cannot lose
//! any. Confirmed buckets are collapsed under removal-correspondence
//! equivalence before becoming MatchClasses. Searches too large to keep full
//! records in memory run twice: a hash-only pass (split into rounds by hash
//! residue when even the hashes outgrow memory) finds duplicated
//! fingerprints, and a re-enumeration keeps records only for those.
//!
//! Assignments that a known symmetry of the graph (the full automorphism
//! group for at most 8 vertices, the reversal for labeled paths) maps to a
//! smaller canonical selection are dropped during the walk. A symmetry image
//! is an identical-vector twin, so without this filter every selection of a
//! symmetric graph lands in the duplicate set and the two-pass mode keeps
//! nearly all records. The orbit minimum represents the whole orbit; the
//! collapse its twins would have caused is restored on the class flag.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::cospectral::{
    exists_removal_correspondence, hosoya_vector, ClassMember, CoalescenceSpec, HosoyaVector,
    MatchClass,
};
use crate::deletions::{deletion_charpoly, is_labeled_path};
use crate::gen::automorphisms;
use crate::graph::{graph6_decode, Graph};
use crate::poly::{IntPoly, Signature};
use crate::report::{
    class_record, dot_for_class, parse_sidecar_line, ClassRecord, ReportError, Summary,
};

#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Maximum signature entry (copies attached at one vertex).
    pub mse: u32,
    /// Bound on selection size; defaults to the graph order.
    pub max_k: Option<usize>,
    /// Worker threads; defaults to the global rayon pool.
    pub jobs: Option<usize>,
    /// Experimental: treat selections related by a known graph symmetry as
    /// one selection instead of as collapsing removal-cospectral mates, so
    /// the removal_cospectral flag reflects only collapses between
    /// symmetry-inequivalent selections. Off by default; the reference
    /// counts are produced without it.
    pub dedup_automorphisms: bool,
}

impl SearchOptions {
    pub fn new(mse: u32) -> Self {
        SearchOptions {
            mse,
            max_k: None,
            jobs: None,
            dedup_automorphisms: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("maximum signature entry must be at least 1")]
    ZeroMse,
    #[error("selection length {k} exceeds graph order {n}")]
    SelectionTooLong { k: usize, n: usize },
    #[error(
        "searching selections up to size {k} with maximum signature entry {mse} \
         exceeds the built-in resource limits; restrict the selection size \
         (--max-k) or lower the maximum entry"
    )]
    SearchTooLarge { k: usize, mse: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Report(#[from] ReportError),
}

/// All signatures of length `k` with entries in `[1, mse]`: nonincreasing
/// and with gcd 1 (scaled signatures give the same matches), in descending
/// lexicographic order.
pub fn enumerate_signatures(k: usize, mse: u32) -> Vec<Signature> {
    fn rec(prefix: &mut Vec<u32>, k: usize, cap: u32, out: &mut Vec<Signature>) {
        if prefix.len() == k {
            let g = prefix.iter().fold(0u32, |acc, &e| num_integer::gcd(acc, e));
            if g == 1 {
                out.push(Signature::new(prefix.clone()).unwrap());
            }
            return;
        }
        for e in (1..=cap).rev() {
            prefix.push(e);
            rec(prefix, k, e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 && mse >= 1 {
        rec(&mut Vec::with_capacity(k), k, mse, &mut out);
    }
    out
}

/// All canonical selections for a signature on a graph: ordered tuples of
/// distinct vertices with ascending labels inside each maximal block of
/// equal signature entries, in lexicographic order.
pub fn enumerate_selections(g: &Graph, sig: &Signature) -> Result<Vec<Vec<usize>>, SearchError> {
    let k = sig.len();
    if k > g.n() {
        return Err(SearchError::SelectionTooLong { k, n: g.n() });
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    rec_selections(
        g.n(),
        &block_bounds(sig),
        0,
        0u64,
        &mut chosen,
        &mut |sel| out.push(sel.to_vec()),
    );
    Ok(out)
}

/// Per position: (block start, block end), both position indices.
fn block_bounds(sig: &Signature) -> Vec<(usize, usize)> {
    let mut bounds = vec![(0, 0); sig.len()];
    for (start, len) in sig.blocks() {
        bounds[start..start + len].fill((start, start + len - 1));
    }
    bounds
}

fn rec_selections(
    n: usize,
    bounds: &[(usize, usize)],
    pos: usize,
    used: u64,
    chosen: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if pos == bounds.len() {
        emit(chosen);
        return;
    }
    let (start, end) = bounds[pos];
    let lb = if pos == start { 0 } else { chosen[pos - 1] + 1 };
    let slots_after = end - pos;
    for v in lb..n.saturating_sub(slots_after) {
        if used >> v & 1 == 1 {
            continue;
        }
        chosen.push(v);
        rec_selections(n, bounds, pos + 1, used | 1 << v, chosen, emit);
        chosen.pop();
    }
}

// ---------------------------------------------------------------------------
// Fingerprinting: HosoyaVector components evaluated at two fixed points
// modulo the Mersenne prime 2^61 - 1.

const M61: u64 = (1 << 61) - 1;
const THETA: [u64; 2] = [1_122_334_455_667_788_991, 987_654_321_987_654_321];

#[inline]
fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= M61 {
        s - M61
    } else {
        s
    }
}

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    let t = a as u128 * b as u128;
    let folded = (t & M61 as u128) as u64 + (t >> 61) as u64;
    if folded >= M61 {
        folded - M61
    } else {
        folded
    }
}

fn eval_mod(p: &IntPoly, theta: u64) -> u64 {
    let modulus = num_bigint::BigInt::from(M61);
    let mut acc = 0u64;
    for c in p.coeffs().iter().rev() {
        let r = ((c % &modulus) + &modulus) % &modulus;
        let r: u64 = num_traits::ToPrimitive::to_u64(&r).unwrap();
        acc = addmod(mulmod(acc, theta), r);
    }
    acc
}

/// A dense table holds all 2^n masks: affordable when the graph is small,
/// mid-sized with most popcounts reachable, or a labeled path (whose
/// deletions are cheap gap products) up to 22 vertices.
fn dense_table(g: &Graph, max_k: usize) -> bool {
    let n = g.n();
    n <= 12 || (2 * max_k >= n && (n <= 16 || (is_labeled_path(g) && n <= 22)))
}

/// Evaluations of `charpoly(g - mask)` at both THETA points, for every mask
/// the subset walk can touch (all subsets of size <= max_k).
enum ValTable {
    Dense(Vec<[u64; 2]>),
    Sparse(HashMap<u64, [u64; 2]>),
}

impl ValTable {
    fn build(g: &Graph, max_k: usize) -> ValTable {
        let n = g.n();
        let labeled = is_labeled_path(g);
        let eval = |mask: u64| {
            let p = deletion_charpoly(g, labeled, mask);
            [eval_mod(&p, THETA[0]), eval_mod(&p, THETA[1])]
        };
        if dense_table(g, max_k) {
            let vals = (0u64..1 << n).into_par_iter().map(eval).collect();
            ValTable::Dense(vals)
        } else {
            let mut map = HashMap::new();
            map.insert(0, eval(0));
            for l in 1..=max_k.min(n) {
                // Gosper's hack over all n-bit masks of popcount l.
                let mut mask = ((1u128 << l) - 1) as u64;
                let top = (((1u128 << l) - 1) << (n - l)) as u64;
                loop {
                    map.insert(mask, eval(mask));
                    if mask == top {
                        break;
                    }
                    let c = mask & mask.wrapping_neg();
                    let r = mask + c;
                    mask = (((r ^ mask) >> 2) / c) | r;
                }
            }
            ValTable::Sparse(map)
        }
    }

    #[inline]
    fn get(&self, mask: u64) -> [u64; 2] {
        match self {
            ValTable::Dense(v) => v[mask as usize],
            ValTable::Sparse(m) => m[&mask],
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

/// Word-at-a-time FNV-style mix; one multiply per u64 keeps leaf hashing
/// cheaper than the arithmetic it digests.
#[inline]
fn fnv_u64(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(FNV_PRIME)
}

// ---------------------------------------------------------------------------
// Enumeration engine. An outer depth-first walk visits ascending vertex
// subsets, keeping deletion evaluations for every subset of the current
// selection; an inner walk assigns multiplicities and folds those
// evaluations into vector fingerprints one graded step per vertex.

/// Engine limits; fixed in production, shrunk by tests to force the
/// two-pass hash mode onto small searches.
struct Tuning {
    /// Estimated leaf count at or below which one pass stores full records.
    direct_limit: u128,
    /// Hashes held in memory per hash-only round; larger estimates split
    /// that pass into rounds by hash residue.
    hash_chunk: u128,
    /// Bound on estimated modular operations before a search is refused.
    work_limit: u128,
}

const TUNING: Tuning = Tuning {
    direct_limit: 2_000_000,
    hash_chunk: 240_000_000,
    work_limit: 1_000_000_000_000,
};

/// The subset walk keeps 2^|S| evaluations per point.
const SUBSET_DEPTH_LIMIT: usize = 22;
/// With entries above 1, every subset fans out into mse^|S| assignments.
const GRADED_DEPTH_LIMIT: usize = 18;
/// A sparse value table enumerates every deletion mask up front.
const SPARSE_MASK_LIMIT: u128 = 4_000_000;

fn binom(n: usize, k: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k {
        // Exact at every step: c * (n - i) is divisible by i + 1.
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    c
}

fn powsat(base: u32, exp: usize) -> u128 {
    let mut r: u128 = 1;
    for _ in 0..exp {
        r = r.saturating_mul(base as u128);
    }
    r
}

/// One fingerprinted selection: (fingerprint, graph index, arena offset).
struct LeafRecord {
    hash: u64,
    gi: u32,
    off: u32,
}

/// Receives every canonical spec the enumerator visits, given as the
/// ascending vertex subset plus per-vertex multiplicities.
trait Sink {
    fn emit(&mut self, hash: u64, verts: &[usize], mults: &[u32]);
}

/// Hash-only pass over large searches, one residue class per round.
struct HashSink<'a> {
    rounds: u64,
    round: u64,
    out: &'a mut Vec<u64>,
}

impl Sink for HashSink<'_> {
    #[inline]
    fn emit(&mut self, hash: u64, _verts: &[usize], _mults: &[u32]) {
        if self.rounds > 1 && hash % self.rounds != self.round {
            return;
        }
        self.out.push(hash);
    }
}

/// Full records, payload `[k u8][vertices k x u8][multiplicities k x u16 le]`
/// in `arena`. With `keep` set, only fingerprints the hash pass saw twice.
struct RecordSink<'a> {
    gi: u32,
    keep: Option<&'a [u64]>,
    records: Vec<LeafRecord>,
    arena: Vec<u8>,
}

impl Sink for RecordSink<'_> {
    #[inline]
    fn emit(&mut self, hash: u64, verts: &[usize], mults: &[u32]) {
        if let Some(keep) = self.keep {
            if keep.binary_search(&hash).is_err() {
                return;
            }
        }
        let off = self.arena.len() as u32;
        self.arena.push(verts.len() as u8);
        for &v in verts {
            self.arena.push(v as u8);
        }
        for &m in mults {
            self.arena.extend_from_slice(&(m as u16).to_le_bytes());
        }
        self.records.push(LeafRecord {
            hash,
            gi: self.gi,
            off,
        });
    }
}

/// Rebuilds the canonical spec from a record payload: descending
/// multiplicity, ties by ascending vertex label.
fn decode_record(arena: &[u8], off: usize) -> (Vec<usize>, Signature) {
    let k = arena[off] as usize;
    let verts = &arena[off + 1..off + 1 + k];
    let mults = &arena[off + 1 + k..off + 1 + 3 * k];
    let mut pairs: Vec<(u32, usize)> = (0..k)
        .map(|i| {
            let m = u16::from_le_bytes([mults[2 * i], mults[2 * i + 1]]);
            (m as u32, verts[i] as usize)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let selection = pairs.iter().map(|&(_, v)| v).collect();
    let signature = Signature::new(pairs.iter().map(|&(m, _)| m).collect()).unwrap();
    (selection, signature)
}

struct Enumerator<'a, S: Sink> {
    n: usize,
    mse: u32,
    kcap: usize,
    val: &'a ValTable,
    /// known non-identity symmetries; non-minimal orbit images are skipped
    sym: &'a [Vec<usize>],
    /// scratch (multiplicity, vertex) pair lists for the orbit check
    orig: Vec<(u32, usize)>,
    image: Vec<(u32, usize)>,
    /// current subset, ascending
    verts: Vec<usize>,
    /// vertex bitmask per subset of current positions
    vmask: Vec<u64>,
    /// deletion evaluations per subset of current positions
    ctab: Vec<[u64; 2]>,
    /// tabs[p]: partial sums over the multiplicities of the first p
    /// vertices; entry [j * (p + 1) + c] pairs subset j of the positions
    /// from p on with the count c of earlier vertices folded in.
    tabs: Vec<Vec<[u64; 2]>>,
    /// multiplicity assigned per position
    mults: Vec<u32>,
    /// fingerprint components of the completed assignment
    acc: Vec<[u64; 2]>,
    sink: S,
}

impl<S: Sink> Enumerator<'_, S> {
    /// Extends the current subset with every vertex from `next` on; each
    /// node of depth >= 1 gets its multiplicities assigned.
    fn dfs(&mut self, depth: usize, next: usize) {
        self.assign(depth);
        if depth == self.kcap {
            return;
        }
        let half = 1usize << depth;
        for w in next..self.n {
            for j in 0..half {
                let nm = self.vmask[j] | 1 << w;
                self.vmask[half + j] = nm;
                self.ctab[half + j] = self.val.get(nm);
            }
            self.verts.push(w);
            self.dfs(depth + 1, w + 1);
            self.verts.pop();
        }
    }

    /// Enumerates multiplicity assignments on the current subset of size k.
    fn assign(&mut self, k: usize) {
        if self.mse == 1 {
            if !self.orbit_minimal_leaf(k) {
                return;
            }
            // All-ones assignment: component c sums the evaluations over
            // the position subsets of size c.
            for a in &mut self.acc[..=k] {
                *a = [0; 2];
            }
            for j in 0..1usize << k {
                let v = self.ctab[j];
                let c = j.count_ones() as usize;
                self.acc[c][0] = addmod(self.acc[c][0], v[0]);
                self.acc[c][1] = addmod(self.acc[c][1], v[1]);
            }
            self.emit(k);
            return;
        }
        for p in 1..k {
            let need = (p + 1) << (k - p);
            if self.tabs[p].len() < need {
                self.tabs[p].resize(need, [0; 2]);
            }
        }
        self.assign_rec(k, 0, 0);
    }

    fn assign_rec(&mut self, k: usize, p: usize, g: u32) {
        for m in 1..=self.mse {
            let g2 = num_integer::gcd(g, m);
            self.mults[p] = m;
            if p + 1 == k {
                // Scaled assignments repeat the unscaled vector: keep gcd 1.
                if g2 == 1 && self.orbit_minimal_leaf(k) {
                    self.fold(k, p, m as u64);
                    self.emit(k);
                }
            } else {
                self.fold(k, p, m as u64);
                self.assign_rec(k, p + 1, g2);
            }
        }
    }

    /// False when some known symmetry maps this assignment to one with a
    /// lexicographically smaller canonical selection. A symmetry image has
    /// the same vector, so dropping it here loses no match: the orbit
    /// minimum stays in the stream and represents the whole orbit.
    fn orbit_minimal_leaf(&mut self, k: usize) -> bool {
        if self.sym.is_empty() {
            return true;
        }
        let by_canon = |a: &(u32, usize), b: &(u32, usize)| b.0.cmp(&a.0).then(a.1.cmp(&b.1));
        self.orig.clear();
        for i in 0..k {
            self.orig.push((self.mults[i], self.verts[i]));
        }
        self.orig.sort_unstable_by(by_canon);
        for perm in self.sym {
            self.image.clear();
            for i in 0..k {
                self.image.push((self.mults[i], perm[self.verts[i]]));
            }
            self.image.sort_unstable_by(by_canon);
            for (a, b) in self.image.iter().zip(&self.orig) {
                match by_canon(a, b) {
                    Ordering::Less => return false,
                    Ordering::Greater => break,
                    Ordering::Equal => {}
                }
            }
        }
        true
    }

    /// One graded step, folding position p's multiplicity into the partial
    /// sums: T'[j][c] = T[2j][c] + mult * T[2j+1][c-1], where bit 0 of a
    /// level-p subset index is position p itself. Level 0 is the deletion
    /// table; level k is the completed fingerprint accumulator.
    fn fold(&mut self, k: usize, p: usize, mult: u64) {
        if p + 1 == k {
            if p == 0 {
                self.acc[0] = self.ctab[0];
                self.acc[1] = [mulmod(mult, self.ctab[1][0]), mulmod(mult, self.ctab[1][1])];
            } else {
                let src = &self.tabs[p];
                let a = &src[..p + 1];
                let b = &src[p + 1..2 * (p + 1)];
                self.acc[0] = a[0];
                for c in 1..=p {
                    self.acc[c] = [
                        addmod(a[c][0], mulmod(mult, b[c - 1][0])),
                        addmod(a[c][1], mulmod(mult, b[c - 1][1])),
                    ];
                }
                self.acc[p + 1] = [mulmod(mult, b[p][0]), mulmod(mult, b[p][1])];
            }
            return;
        }
        let js = 1usize << (k - p - 1);
        if p == 0 {
            let ctab = &self.ctab;
            let dst = &mut self.tabs[1];
            for j in 0..js {
                let a = ctab[2 * j];
                let b = ctab[2 * j + 1];
                dst[2 * j] = a;
                dst[2 * j + 1] = [mulmod(mult, b[0]), mulmod(mult, b[1])];
            }
        } else {
            let (lo, hi) = self.tabs.split_at_mut(p + 1);
            let src = &lo[p];
            let dst = &mut hi[0];
            let sw = p + 1;
            let dw = p + 2;
            for j in 0..js {
                let a = &src[2 * j * sw..][..sw];
                let b = &src[(2 * j + 1) * sw..][..sw];
                let d = &mut dst[j * dw..][..dw];
                d[0] = a[0];
                for c in 1..=p {
                    d[c] = [
                        addmod(a[c][0], mulmod(mult, b[c - 1][0])),
                        addmod(a[c][1], mulmod(mult, b[c - 1][1])),
                    ];
                }
                d[p + 1] = [mulmod(mult, b[p][0]), mulmod(mult, b[p][1])];
            }
        }
    }

    fn emit(&mut self, k: usize) {
        let mut h = FNV_OFFSET;
        for a in &self.acc[..=k] {
            h = fnv_u64(h, a[0]);
            h = fnv_u64(h, a[1]);
        }
        self.sink.emit(h, &self.verts, &self.mults[..k]);
    }
}

/// Runs one work unit: all subsets whose smallest vertex is `v0`.
fn run_unit<S: Sink>(
    g: &Graph,
    val: &ValTable,
    sym: &[Vec<usize>],
    mse: u32,
    kcap: usize,
    v0: usize,
    sink: S,
) -> S {
    let size = 1usize << kcap;
    let mut e = Enumerator {
        n: g.n(),
        mse,
        kcap,
        val,
        sym,
        orig: Vec::with_capacity(kcap),
        image: Vec::with_capacity(kcap),
        verts: Vec::with_capacity(kcap),
        vmask: vec![0; size],
        ctab: vec![[0; 2]; size],
        tabs: vec![Vec::new(); kcap],
        mults: vec![1; kcap],
        acc: vec![[0; 2]; kcap + 1],
        sink,
    };
    e.ctab[0] = val.get(0);
    e.vmask[1] = 1 << v0;
    e.ctab[1] = val.get(1 << v0);
    e.verts.push(v0);
    e.dfs(1, v0 + 1);
    e.sink
}

/// Shared context for the enumeration passes over one group.
struct Walk<'a> {
    group: &'a [Graph],
    vals: &'a [ValTable],
    syms: &'a [Vec<Vec<usize>>],
    mse: u32,
    k_max: usize,
}

impl Walk<'_> {
    /// Work units: one per (graph, smallest selected vertex). Results
    /// always flatten in unit order, so output is independent of worker
    /// count.
    fn units(&self) -> Vec<(usize, usize)> {
        let mut units = Vec::new();
        for (gi, g) in self.group.iter().enumerate() {
            if self.k_max.min(g.n()) >= 1 {
                for v0 in 0..g.n() {
                    units.push((gi, v0));
                }
            }
        }
        units
    }

    fn run_unit<S: Sink>(&self, gi: usize, v0: usize, sink: S) -> S {
        let g = &self.group[gi];
        run_unit(
            g,
            &self.vals[gi],
            &self.syms[gi],
            self.mse,
            self.k_max.min(g.n()),
            v0,
            sink,
        )
    }

    fn collect_records(&self, keep: Option<&[u64]>) -> (Vec<LeafRecord>, Vec<u8>) {
        let sinks: Vec<RecordSink> = self
            .units()
            .into_par_iter()
            .map(|(gi, v0)| {
                let sink = RecordSink {
                    gi: gi as u32,
                    keep,
                    records: Vec::new(),
                    arena: Vec::new(),
                };
                self.run_unit(gi, v0, sink)
            })
            .collect();
        let mut records = Vec::new();
        let mut arena = Vec::new();
        for sink in sinks {
            let base = arena.len() as u32;
            arena.extend_from_slice(&sink.arena);
            records.extend(sink.records.into_iter().map(|r| LeafRecord {
                off: r.off + base,
                ..r
            }));
        }
        (records, arena)
    }

    /// Hash-only pass, sequential so one rounds-sized buffer bounds peak
    /// memory; returns the sorted fingerprints seen at least twice.
    fn collect_duplicate_hashes(&self, rounds: u64, leaves: u128, tuning: &Tuning) -> Vec<u64> {
        let hint = leaves.min(tuning.hash_chunk) as usize;
        let mut dups = Vec::new();
        for round in 0..rounds {
            let mut hashes: Vec<u64> = Vec::with_capacity(hint);
            for (gi, v0) in self.units() {
                let sink = HashSink {
                    rounds,
                    round,
                    out: &mut hashes,
                };
                self.run_unit(gi, v0, sink);
            }
            hashes.sort_unstable();
            let mut i = 0;
            while i < hashes.len() {
                let mut j = i + 1;
                while j < hashes.len() && hashes[j] == hashes[i] {
                    j += 1;
                }
                if j - i >= 2 {
                    dups.push(hashes[i]);
                }
                i = j;
            }
        }
        dups.sort_unstable();
        dups
    }
}

/// Known non-identity symmetries of a graph: the full automorphism group
/// for small orders, the reversal for labeled paths, nothing otherwise.
/// Missing symmetries only cost collapse work at confirm time.
fn known_symmetries(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    if n <= 8 {
        automorphisms(g)
            .into_iter()
            .filter(|perm| perm.iter().enumerate().any(|(i, &v)| i != v))
            .collect()
    } else if is_labeled_path(g) {
        vec![(0..n).rev().collect()]
    } else {
        Vec::new()
    }
}

/// True when a known symmetry maps `sel` to a different canonical
/// selection: the walk filtered that twin out, so it stands for a
/// removal-cospectral mate that a full enumeration would have collapsed.
fn has_orbit_twin(sel: &[usize], sig: &Signature, sym: &[Vec<usize>]) -> bool {
    let mut image = vec![0usize; sel.len()];
    for perm in sym {
        for (i, &v) in sel.iter().enumerate() {
            image[i] = perm[v];
        }
        for (start, len) in sig.blocks() {
            image[start..start + len].sort_unstable();
        }
        if image.as_slice() != sel {
            return true;
        }
    }
    false
}

/// Confirms one fingerprint bucket with exact vectors, collapses
/// removal-equivalent members, and emits the surviving classes.
fn confirm_bucket(
    group: &[Graph],
    syms: &[Vec<Vec<usize>>],
    dedup: bool,
    arena: &[u8],
    records: &[LeafRecord],
    classes: &mut Vec<MatchClass>,
) {
    let mut members: Vec<(usize, CoalescenceSpec)> = records
        .iter()
        .map(|r| {
            let (selection, signature) = decode_record(arena, r.off as usize);
            let gi = r.gi as usize;
            let spec = CoalescenceSpec::new(group[gi].clone(), selection, signature).unwrap();
            (gi, spec)
        })
        .collect();
    members.sort_by(|a, b| (a.0, a.1.vertices()).cmp(&(b.0, b.1.vertices())));
    // A bucket can mix signatures through hash collisions; grouping by the
    // exact vector separates them again, since equal vectors force equal
    // signatures (the leading coefficients are its elementary symmetric
    // polynomials).
    let mut by_vector: Vec<(HosoyaVector, Vec<(usize, CoalescenceSpec)>)> = Vec::new();
    for (gi, spec) in members {
        let vector = hosoya_vector(&spec);
        match by_vector.iter_mut().find(|(v, _)| *v == vector) {
            Some((_, list)) => list.push((gi, spec)),
            None => by_vector.push((vector, vec![(gi, spec)])),
        }
    }
    for (vector, list) in by_vector {
        let mut reps: Vec<ClassMember> = Vec::new();
        let mut collapsed = false;
        for (gi, spec) in list {
            let equivalent = reps
                .iter()
                .any(|rep| exists_removal_correspondence(&rep.spec, &spec).unwrap());
            if equivalent {
                collapsed = true;
            } else {
                // The walk already collapsed this member's symmetry twins
                // into it; restore their mark unless dedup hides it.
                if !dedup && has_orbit_twin(spec.vertices(), spec.signature(), &syms[gi]) {
                    collapsed = true;
                }
                reps.push(ClassMember {
                    graph_index: gi,
                    spec,
                });
            }
        }
        if reps.len() >= 2 {
            classes.push(MatchClass {
                signature: reps[0].spec.signature().clone(),
                vector,
                members: reps,
                removal_cospectral: collapsed,
            });
        }
    }
}

/// Searches one group of cospectral graphs for all match classes up to the
/// option bounds. Output order is deterministic: ascending selection size,
/// then signatures in descending lexicographic order, then vector order;
/// byte-identical across worker counts.
pub fn find_matches(
    group: &[Graph],
    options: &SearchOptions,
) -> Result<Vec<MatchClass>, SearchError> {
    find_matches_tuned(group, options, &TUNING)
}

fn find_matches_tuned(
    group: &[Graph],
    options: &SearchOptions,
    tuning: &Tuning,
) -> Result<Vec<MatchClass>, SearchError> {
    if options.mse == 0 {
        return Err(SearchError::ZeroMse);
    }
    if group.is_empty() {
        return Ok(Vec::new());
    }
    let n_max = group.iter().map(Graph::n).max().unwrap();
    let k_max = options.max_k.unwrap_or(n_max).min(n_max);
    let too_large = || SearchError::SearchTooLarge {
        k: k_max,
        mse: options.mse,
    };
    // Refuse searches whose tables or estimated work cannot fit; the
    // estimates saturate rather than overflow.
    let mut leaves: u128 = 0;
    let mut work: u128 = 0;
    for g in group {
        let kc = k_max.min(g.n());
        if kc > SUBSET_DEPTH_LIMIT
            || (options.mse >= 2 && kc > GRADED_DEPTH_LIMIT)
            || options.mse > u16::MAX as u32
        {
            return Err(too_large());
        }
        if !dense_table(g, kc) {
            let masks = (1..=kc).fold(0u128, |acc, d| acc.saturating_add(binom(g.n(), d)));
            if masks > SPARSE_MASK_LIMIT {
                return Err(too_large());
            }
        }
        for d in 1..=kc {
            let subsets = binom(g.n(), d);
            let fan = powsat(options.mse, d);
            leaves = leaves.saturating_add(subsets.saturating_mul(fan));
            let per_subset = (1u128 << d).saturating_add(fan.saturating_mul(2 * (d as u128 + 1)));
            work = work.saturating_add(subsets.saturating_mul(per_subset));
        }
    }
    let direct = leaves <= tuning.direct_limit;
    let rounds = if direct {
        0
    } else {
        leaves.div_ceil(tuning.hash_chunk)
    };
    let passes = if direct { 1 } else { rounds + 1 };
    if work.saturating_mul(passes) > tuning.work_limit {
        return Err(too_large());
    }
    let run = || {
        let vals: Vec<ValTable> = group
            .par_iter()
            .map(|g| ValTable::build(g, k_max.min(g.n())))
            .collect();
        let syms: Vec<Vec<Vec<usize>>> = group.iter().map(known_symmetries).collect();
        let walk = Walk {
            group,
            vals: &vals,
            syms: &syms,
            mse: options.mse,
            k_max,
        };
        let (mut records, arena) = if direct {
            walk.collect_records(None)
        } else {
            let dups = walk.collect_duplicate_hashes(rounds as u64, leaves, tuning);
            walk.collect_records(Some(&dups))
        };
        records.sort_unstable_by_key(|r| (r.hash, r.gi, r.off));
        let mut classes: Vec<MatchClass> = Vec::new();
        let mut i = 0;
        while i < records.len() {
            let mut j = i + 1;
            while j < records.len() && records[j].hash == records[i].hash {
                j += 1;
            }
            if j - i >= 2 {
                confirm_bucket(
                    group,
                    &syms,
                    options.dedup_automorphisms,
                    &arena,
                    &records[i..j],
                    &mut classes,
                );
            }
            i = j;
        }
        classes.sort_by(|a, b| {
            a.signature
                .len()
                .cmp(&b.signature.len())
                .then_with(|| b.signature.entries().cmp(a.signature.entries()))
                .then_with(|| a.vector.cmp(&b.vector))
        });
        classes
    };
    let classes = match options.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    };
    Ok(classes)
}

/// Result of a file search; the same counts are serialized to summary.json.
#[derive(Debug, Clone, Default)]
pub struct SearchReport {
    pub summary: Summary,
    pub records: Vec<ClassRecord>,
}

/// Streams a sorted sidecar file group by group, searching each group of
/// cospectral graphs, and writes per-class DOT files, classes.jsonl, and
/// summary.json into `out_dir` as classes are found. Malformed lines are
/// reported as warnings and skipped.
pub fn search_file(
    input: &Path,
    out_dir: &Path,
    options: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    let reader = BufReader::new(fs::File::open(input)?);
    fs::create_dir_all(out_dir)?;
    let mut jsonl = fs::File::create(out_dir.join("classes.jsonl"))?;
    let mut report = SearchReport::default();
    // group under construction: (coeff key, g6 strings, graphs)
    let mut key: Option<Vec<num_bigint::BigInt>> = None;
    let mut g6s: Vec<String> = Vec::new();
    let mut graphs: Vec<Graph> = Vec::new();
    let flush = |g6s: &mut Vec<String>,
                 graphs: &mut Vec<Graph>,
                 report: &mut SearchReport,
                 jsonl: &mut fs::File|
     -> Result<(), SearchError> {
        if graphs.is_empty() {
            g6s.clear();
            return Ok(());
        }
        report.summary.groups += 1;
        for class in find_matches(graphs, options)? {
            let index = report.summary.classes + 1;
            report.summary.record_class_size(class.members.len());
            let dot = dot_for_class(&class, g6s, index);
            fs::write(out_dir.join(format!("class_{index:05}.dot")), dot)?;
            let record = class_record(&class, g6s, index);
            writeln!(jsonl, "{}", serde_json::to_string(&record).unwrap())?;
            report.records.push(record);
        }
        g6s.clear();
        graphs.clear();
        Ok(())
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = match parse_sidecar_line(&line) {
            Ok(e) => e,
            Err(message) => {
                report
                    .summary
                    .warnings
                    .push(format!("line {}: {message}", i + 1));
                continue;
            }
        };
        let graph = match graph6_decode(&entry.g6) {
            Ok(g) => g,
            Err(e) => {
                report.summary.warnings.push(format!("line {}: {e}", i + 1));
                continue;
            }
        };
        if key.as_ref() != Some(&entry.coeffs) {
            flush(&mut g6s, &mut graphs, &mut report, &mut jsonl)?;
            key = Some(entry.coeffs.clone());
        }
        g6s.push(entry.g6);
        graphs.push(graph);
    }
    flush(&mut g6s, &mut graphs, &mut report, &mut jsonl)?;
    fs::write(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&report.summary).unwrap(),
    )?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::charpoly;
    use crate::gen::small_graphs;
    use crate::graph::graph6_encode;
    use crate::report::format_sidecar_line;
    use std::collections::{BTreeMap, BTreeSet};

    fn sig(entries: &[u32]) -> Signature {
        Signature::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn signature_enumeration_matches_hand_lists() {
        let lists = |k, mse| {
            enumerate_signatures(k, mse)
                .iter()
                .map(|s| s.entries().to_vec())
                .collect::<Vec<_>>()
        };
        assert_eq!(lists(3, 1), vec![vec![1, 1, 1]]);
        assert_eq!(lists(2, 2), vec![vec![2, 1], vec![1, 1]]);
        assert_eq!(
            lists(2, 3),
            vec![vec![3, 2], vec![3, 1], vec![2, 1], vec![1, 1]]
        );
        // Descending lexicographic order, gcd always 1.
        let all = enumerate_signatures(4, 5);
        for w in all.windows(2) {
            assert!(w[0].entries() > w[1].entries());
        }
        assert!(all.iter().all(Signature::is_normalized));
    }

    #[test]
    fn selection_enumeration_matches_hand_lists() {
        let k2 = Graph::from_edges(2, &[(0, 1)]);
        assert_eq!(
            enumerate_selections(&k2, &sig(&[1, 1])).unwrap(),
            vec![vec![0, 1]]
        );
        assert_eq!(
            enumerate_selections(&k2, &sig(&[2, 1])).unwrap(),
            vec![vec![0, 1], vec![1, 0]]
        );
        let p3 = Graph::path(3).unwrap();
        assert_eq!(
            enumerate_selections(&p3, &sig(&[1, 1, 1])).unwrap(),
            vec![vec![0, 1, 2]]
        );
        assert!(matches!(
            enumerate_selections(&k2, &sig(&[1, 1, 1])),
            Err(SearchError::SelectionTooLong { k: 3, n: 2 })
        ));
    }

    #[test]
    fn selection_count_matches_multinomial() {
        // Selections of sig blocks (b1..br) on n vertices:
        // n! / ((n-k)! * b1! * ... * br!)
        let p6 = Graph::path(6).unwrap();
        let s = sig(&[2, 2, 1, 1]);
        let count = enumerate_selections(&p6, &s).unwrap().len();
        // 6*5*4*3 ordered tuples, divided by 2! per equal-entry block.
        assert_eq!(count, 360 / (2 * 2));
        let all: BTreeSet<Vec<usize>> =
            enumerate_selections(&p6, &s).unwrap().into_iter().collect();
        assert_eq!(all.len(), count, "no duplicates");
    }

    #[test]
    fn modular_arithmetic_is_exact() {
        assert_eq!(mulmod(M61 - 1, M61 - 1), 1); // (-1)^2 = 1 mod p
        assert_eq!(addmod(M61 - 1, 1), 0);
        let p = IntPoly::from_desc_i64(&[1, 0, -4, 0]);
        // Direct Horner against the definition.
        let direct = |theta: u64| {
            let t2 = mulmod(theta, theta);
            let t3 = mulmod(t2, theta);
            addmod(t3, M61 - mulmod(4, theta) % M61)
        };
        assert_eq!(eval_mod(&p, THETA[0]), direct(THETA[0]));
        assert_eq!(eval_mod(&p, THETA[1]), direct(THETA[1]));
    }

    #[test]
    fn p8_mse1_finds_exactly_the_known_pair() {
        let p8 = Graph::path(8).unwrap();
        let classes = find_matches(&[p8], &SearchOptions::new(1)).unwrap();
        assert_eq!(classes.len(), 1);
        let class = &classes[0];
        assert_eq!(class.signature.entries(), &[1, 1, 1, 1]);
        assert_eq!(class.members.len(), 2);
        assert_eq!(class.members[0].spec.vertices(), &[0, 2, 3, 6]);
        assert_eq!(class.members[1].spec.vertices(), &[0, 3, 5, 6]);
        // The path reversal mirrors both selections onto removal-cospectral
        // twins, which collapse into the two representatives and set the flag.
        assert!(class.removal_cospectral);
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let p8 = Graph::path(8).unwrap();
        let mut opts = SearchOptions::new(2);
        opts.jobs = Some(1);
        let serial = find_matches(std::slice::from_ref(&p8), &opts).unwrap();
        opts.jobs = Some(4);
        let parallel = find_matches(&[p8], &opts).unwrap();
        assert_eq!(serial, parallel);
        assert!(!serial.is_empty());
    }

    #[test]
    fn naive_oracle_agrees_on_all_5_vertex_graphs() {
        // Independent completeness check: exact vectors for every canonical
        // spec, bucketed brute-force, collapsed with the same equivalence.
        let graphs = small_graphs(5).unwrap();
        let groups = crate::cospectral::group_cospectral(&graphs);
        let options = SearchOptions::new(2);
        for group_idx in groups {
            let group: Vec<Graph> = group_idx.iter().map(|&i| graphs[i].clone()).collect();
            let fast = find_matches(&group, &options).unwrap();
            let naive = naive_search(&group, 2, 5);
            assert_eq!(fast, naive, "group {group_idx:?}");
        }
    }

    #[test]
    fn naive_oracle_agrees_at_higher_multiplicities() {
        // Exercises the graded walk with entries above 1 and the gcd filter:
        // assignments like (2,2) or (3,3) are scaled copies of smaller ones
        // and must not yield extra classes.
        let spider = Graph::from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)]);
        let fast = find_matches(std::slice::from_ref(&spider), &SearchOptions::new(3)).unwrap();
        let naive = naive_search(&[spider], 3, 6);
        assert_eq!(fast, naive);
        assert!(!fast.is_empty());
    }

    fn naive_search(group: &[Graph], mse: u32, max_k: usize) -> Vec<MatchClass> {
        let n_max = group.iter().map(Graph::n).max().unwrap();
        let mut classes = Vec::new();
        for k in 1..=n_max.min(max_k) {
            for s in enumerate_signatures(k, mse) {
                let mut buckets: BTreeMap<HosoyaVector, Vec<(usize, CoalescenceSpec)>> =
                    BTreeMap::new();
                for (gi, g) in group.iter().enumerate() {
                    if k > g.n() {
                        continue;
                    }
                    for sel in enumerate_selections(g, &s).unwrap() {
                        let spec = CoalescenceSpec::new(g.clone(), sel, s.clone()).unwrap();
                        let v = hosoya_vector(&spec);
                        buckets.entry(v).or_default().push((gi, spec));
                    }
                }
                // Deterministic order: members by (graph, selection);
                // classes by vector.
                let mut sig_classes = Vec::new();
                for (vector, mut members) in buckets {
                    members.sort_by(|a, b| (a.0, a.1.vertices()).cmp(&(b.0, b.1.vertices())));
                    if members.len() < 2 {
                        continue;
                    }
                    let mut reps: Vec<ClassMember> = Vec::new();
                    let mut collapsed = false;
                    for (gi, spec) in members {
                        if reps
                            .iter()
                            .any(|r| exists_removal_correspondence(&r.spec, &spec).unwrap())
                        {
                            collapsed = true;
                        } else {
                            reps.push(ClassMember {
                                graph_index: gi,
                                spec,
                            });
                        }
                    }
                    if reps.len() >= 2 {
                        sig_classes.push(MatchClass {
                            signature: s.clone(),
                            vector,
                            members: reps,
                            removal_cospectral: collapsed,
                        });
                    }
                }
                sig_classes.sort_by(|a, b| a.vector.cmp(&b.vector));
                classes.extend(sig_classes);
            }
        }
        classes
    }

    #[test]
    fn emitted_classes_survive_concrete_reverification() {
        use crate::coalescence::concrete_coalescence_charpoly;
        use crate::graph::RootedGraph;
        let p8 = Graph::path(8).unwrap();
        let classes = find_matches(&[p8], &SearchOptions::new(2)).unwrap();
        assert!(!classes.is_empty());
        let rooted = RootedGraph::new(Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]), 0).unwrap();
        for class in &classes {
            let polys: BTreeSet<IntPoly> = class
                .members
                .iter()
                .map(|m| {
                    concrete_coalescence_charpoly(
                        m.spec.graph(),
                        m.spec.vertices(),
                        m.spec.signature(),
                        &rooted,
                    )
                    .unwrap()
                })
                .collect();
            assert_eq!(polys.len(), 1, "all members cospectral after attachment");
        }
    }

    #[test]
    fn automorphism_dedup_drops_mirror_selections() {
        let p8 = Graph::path(8).unwrap();
        let mut opts = SearchOptions::new(1);
        let plain = find_matches(std::slice::from_ref(&p8), &opts).unwrap();
        opts.dedup_automorphisms = true;
        let deduped = find_matches(&[p8], &opts).unwrap();
        // The known pair's selections are not mirror images of each other,
        // so it survives; its mirrored twin class is dropped.
        assert_eq!(plain.len(), 1);
        assert_eq!(deduped.len(), 1);
        // On a graph with a nontrivial automorphism moving the selection,
        // mirrored singleton specs collapse before bucketing.
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let mut opts = SearchOptions::new(2);
        let plain = find_matches(std::slice::from_ref(&star), &opts).unwrap();
        opts.dedup_automorphisms = true;
        let deduped = find_matches(&[star], &opts).unwrap();
        assert!(deduped.len() <= plain.len());
    }

    #[test]
    fn two_pass_hash_mode_matches_direct() {
        // Shrunken limits force the hash-only rounds plus the re-enumeration
        // that production uses beyond the direct limit; seven rounds here.
        let p8 = Graph::path(8).unwrap();
        let opts = SearchOptions::new(2);
        let direct = find_matches(std::slice::from_ref(&p8), &opts).unwrap();
        let tuning = Tuning {
            direct_limit: 10,
            hash_chunk: 1000,
            work_limit: TUNING.work_limit,
        };
        let two_pass = find_matches_tuned(std::slice::from_ref(&p8), &opts, &tuning).unwrap();
        assert_eq!(direct, two_pass);
        assert!(!direct.is_empty());
    }

    #[test]
    fn bounded_selection_size_uses_sparse_tables() {
        // 25 vertices forces the sparse value table; max_k bounds the walk.
        let p25 = Graph::path(25).unwrap();
        let mut opts = SearchOptions::new(1);
        opts.max_k = Some(3);
        let fast = find_matches(std::slice::from_ref(&p25), &opts).unwrap();
        let naive = naive_search(&[p25], 1, 3);
        assert_eq!(fast, naive);
    }

    #[test]
    fn oversized_searches_are_refused() {
        let p30 = Graph::path(30).unwrap();
        let err = find_matches(std::slice::from_ref(&p30), &SearchOptions::new(1)).unwrap_err();
        assert!(matches!(err, SearchError::SearchTooLarge { k: 30, mse: 1 }));
        let p20 = Graph::path(20).unwrap();
        let err = find_matches(std::slice::from_ref(&p20), &SearchOptions::new(2)).unwrap_err();
        assert!(matches!(err, SearchError::SearchTooLarge { k: 20, mse: 2 }));
        let p3 = Graph::path(3).unwrap();
        let err =
            find_matches(std::slice::from_ref(&p3), &SearchOptions::new(100_000)).unwrap_err();
        assert!(matches!(err, SearchError::SearchTooLarge { .. }));
    }

    #[test]
    fn search_file_streams_groups_and_writes_reports() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("sorted");
        let out = dir.path().join("classes");
        let p8 = Graph::path(8).unwrap();
        let p8_g6 = graph6_encode(&p8).unwrap();
        let k2 = Graph::from_edges(2, &[(0, 1)]);
        let lines = [
            format_sidecar_line(&graph6_encode(&k2).unwrap(), &charpoly(&k2)),
            format_sidecar_line(&p8_g6, &charpoly(&p8)),
            "not a valid line !!".to_string(),
        ];
        fs::write(&input, lines.join("\n")).unwrap();
        let report = search_file(&input, &out, &SearchOptions::new(1)).unwrap();
        assert_eq!(report.summary.groups, 2);
        assert_eq!(report.summary.classes, 1);
        assert_eq!(report.summary.pairs, 1);
        assert_eq!(report.summary.warnings.len(), 1);
        assert!(report.summary.warnings[0].starts_with("line 3"));
        assert!(out.join("class_00001.dot").exists());
        let jsonl = fs::read_to_string(out.join("classes.jsonl")).unwrap();
        assert_eq!(jsonl.lines().count(), 1);
        let record: ClassRecord = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
        assert_eq!(record.members[0].g6, p8_g6);
        assert_eq!(record.members[0].selection, vec![0, 2, 3, 6]);
        let summary: Summary =
            serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary, report.summary);
    }

    #[test]
    fn empty_input_gives_empty_report() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("empty");
        fs::write(&input, "").unwrap();
        let report = search_file(&input, &dir.path().join("out"), &SearchOptions::new(2)).unwrap();
        assert_eq!(report.summary.groups, 0);
        assert_eq!(report.summary.classes, 0);
        assert!(report.records.is_empty());
    }
}
