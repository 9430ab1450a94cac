//! Constructive infinite family of CMC pairs on paths.
//!
//! For parameters (k, m, d, a_1..a_p) the two specs live on the path
//! P_{kd-1}: both select the lattice points u_{(i,j)} = (i-1)d + a_j, and
//! one additionally selects v = md-1 while the other selects w = (k-m)d-1.
//! All attachments are single copies.

use std::collections::BTreeSet;
use std::str::FromStr;

use thiserror::Error;

use crate::cospectral::{hosoya_vector, CoalescenceSpec, CospectralError};
use crate::graph::{Graph, MAX_VERTICES};
use crate::poly::Signature;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("k must be at least 3, got {0}")]
    KTooSmall(u32),
    #[error("m must satisfy 1 <= m < k/2, got m={m} with k={k}")]
    MOutOfRange { m: u32, k: u32 },
    #[error("d must be at least 2, got {0}")]
    DTooSmall(u32),
    #[error("offsets must be strictly increasing and at most d-2, got {0:?}")]
    BadOffsets(Vec<u32>),
    #[error("path order {0} exceeds the {MAX_VERTICES}-vertex capacity")]
    TooLarge(usize),
    #[error("parameter syntax is k,m,d[,a1:a2:...:ap]: {0}")]
    Syntax(String),
}

/// Parameters (k, m, d, a); the offset tuple may be empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathFamilyParams {
    k: u32,
    m: u32,
    d: u32,
    a: Vec<u32>,
}

impl PathFamilyParams {
    pub fn new(k: u32, m: u32, d: u32, a: Vec<u32>) -> Result<Self, FamilyError> {
        if k < 3 {
            return Err(FamilyError::KTooSmall(k));
        }
        if m < 1 || 2 * m >= k {
            return Err(FamilyError::MOutOfRange { m, k });
        }
        if d < 2 {
            return Err(FamilyError::DTooSmall(d));
        }
        let increasing = a.windows(2).all(|w| w[0] < w[1]);
        if !increasing || a.last().is_some_and(|&last| last > d - 2) {
            return Err(FamilyError::BadOffsets(a));
        }
        let n = (k * d - 1) as usize;
        if n > MAX_VERTICES {
            return Err(FamilyError::TooLarge(n));
        }
        Ok(PathFamilyParams { k, m, d, a })
    }

    pub fn n(&self) -> usize {
        (self.k * self.d - 1) as usize
    }

    pub fn v(&self) -> usize {
        (self.m * self.d - 1) as usize
    }

    pub fn w(&self) -> usize {
        ((self.k - self.m) * self.d - 1) as usize
    }

    /// The common selection part: (i-1)d + a_j for i = 1..k, j = 1..p.
    pub fn lattice(&self) -> Vec<usize> {
        let mut u = Vec::with_capacity((self.k as usize) * self.a.len());
        for i in 0..self.k {
            for &aj in &self.a {
                u.push((i * self.d + aj) as usize);
            }
        }
        u
    }

    /// The proof's correspondence between the two selections: shifts the
    /// segment left of v right by (k-m)d and the segment right of v left
    /// by md; v itself maps to w.
    pub fn theta(&self, x: usize) -> usize {
        if x == self.v() {
            self.w()
        } else if x < self.v() {
            x + ((self.k - self.m) * self.d) as usize
        } else {
            x - (self.m * self.d) as usize
        }
    }

    /// Both specs of the pair, canonicalized, with all-ones signature of
    /// length kp + 1.
    pub fn generate_pair(&self) -> (CoalescenceSpec, CoalescenceSpec) {
        let path = Graph::path(self.n()).unwrap();
        let sig = Signature::new(vec![1; self.k as usize * self.a.len() + 1]).unwrap();
        let mut sel1 = self.lattice();
        let mut sel2 = sel1.clone();
        sel1.push(self.v());
        sel2.push(self.w());
        (
            CoalescenceSpec::new(path.clone(), sel1, sig.clone()).unwrap(),
            CoalescenceSpec::new(path, sel2, sig).unwrap(),
        )
    }
}

impl FromStr for PathFamilyParams {
    type Err = FamilyError;

    /// Accepts "k,m,d" or "k,m,d,a1:a2:...:ap".
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        let syntax = || FamilyError::Syntax(s.to_string());
        let fields: Vec<&str> = s.split(',').collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(syntax());
        }
        let int = |f: &str| f.trim().parse::<u32>().map_err(|_| syntax());
        let k = int(fields[0])?;
        let m = int(fields[1])?;
        let d = int(fields[2])?;
        let a = match fields.get(3) {
            None => Vec::new(),
            Some(f) if f.trim().is_empty() => Vec::new(),
            Some(f) => f.split(':').map(int).collect::<Result<Vec<_>, _>>()?,
        };
        PathFamilyParams::new(k, m, d, a)
    }
}

/// True iff the two specs have equal HosoyaVectors (and so are cospectral
/// for every attached rooted graph).
pub fn verify_pair(p1: &CoalescenceSpec, p2: &CoalescenceSpec) -> Result<bool, CospectralError> {
    if p1.signature() != p2.signature() {
        return Err(CospectralError::SignatureMismatch);
    }
    Ok(hosoya_vector(p1) == hosoya_vector(p2))
}

/// One generated pair of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPair {
    pub params: PathFamilyParams,
    pub spec1: CoalescenceSpec,
    pub spec2: CoalescenceSpec,
}

/// All pairs with path order at most `max_n` and at most `max_p` offsets,
/// deduplicated by canonical spec comparison (distinct parameters can
/// coincide as specs); deterministic parameter order, first parameters win.
pub fn sweep_pairs(max_n: usize, max_p: usize) -> Vec<FamilyPair> {
    let mut seen: BTreeSet<(CoalescenceSpec, CoalescenceSpec)> = BTreeSet::new();
    let mut out = Vec::new();
    for k in 3..=(max_n as u32).div_ceil(2) {
        for d in 2.. {
            let n = k * d - 1;
            if n as usize > max_n {
                break;
            }
            for m in 1..k {
                if 2 * m >= k {
                    break;
                }
                for a in offset_tuples(d, max_p) {
                    let params = PathFamilyParams::new(k, m, d, a).unwrap();
                    let (spec1, spec2) = params.generate_pair();
                    if seen.insert((spec1.clone(), spec2.clone())) {
                        out.push(FamilyPair {
                            params,
                            spec1,
                            spec2,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Strictly increasing tuples from [0, d-2] of length 0..=max_p, shortest
/// first, then lexicographic.
fn offset_tuples(d: u32, max_p: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut level: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..max_p {
        let mut next = Vec::new();
        for t in &level {
            let lb = t.last().map_or(0, |&x| x + 1);
            for v in lb..=d - 2 {
                let mut nt = t.clone();
                nt.push(v);
                next.push(nt);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}
