//! Dense univariate polynomials over the integers, plus multiplicity
//! signatures.
//!
//! `IntPoly` stores coefficients in ascending degree order with no trailing
//! zeros; the zero polynomial is the empty coefficient vector. Coefficients
//! are arbitrary-precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("signature entries must be positive")]
    NonPositiveSignatureEntry,
    #[error("arity mismatch: polynomial has {got} indeterminates, substitution needs {expected}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Integer polynomial in one indeterminate `x`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    /// Ascending degree; `coeffs.last()` is nonzero when nonempty.
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn x() -> Self {
        IntPoly::monomial(BigInt::one(), 1)
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigInt, degree: usize) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c;
        IntPoly { coeffs }
    }

    /// Builds from ascending-degree coefficients, stripping trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// Builds from descending-degree coefficients (the order used in reports
    /// and sidecar files).
    pub fn from_desc(mut coeffs: Vec<BigInt>) -> Self {
        coeffs.reverse();
        IntPoly::from_coeffs(coeffs)
    }

    /// Convenience for tests and fixtures: descending machine integers.
    pub fn from_desc_i64(coeffs: &[i64]) -> Self {
        IntPoly::from_desc(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Ascending-degree view.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Descending-degree coefficient list, padded to the given degree; the
    /// layout used by sidecar lines and class records.
    pub fn coeffs_desc(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = self.coeffs.iter().rev().cloned().collect();
        if out.is_empty() {
            out.push(BigInt::zero());
        }
        out
    }

    /// Ascending coefficients as i128, or `None` if any does not fit.
    pub fn coeffs_i128(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(ToPrimitive::to_i128).collect()
    }

    pub fn add(&self, rhs: &IntPoly) -> IntPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (i, c) in short.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        IntPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, rhs: &IntPoly) -> IntPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        IntPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_i64(&self, c: i64) -> IntPoly {
        self.scale(&BigInt::from(c))
    }

    /// Multiplies by `x^k`.
    pub fn mul_xpow(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs }
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut acc = IntPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Total order: by degree, then descending-degree coefficient comparison.
    pub fn cmp_poly(&self, other: &IntPoly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for IntPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IntPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_poly(other)
    }
}

impl fmt::Display for IntPoly {
    /// Renders `c_d x^d + ... + c_0`, e.g. `x^5 - 4x^3 + 3x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one();
            match (deg, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{deg}")?,
                (_, false) => write!(f, "{mag}x^{deg}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl std::ops::Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::add(self, rhs)
    }
}

impl std::ops::Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::sub(self, rhs)
    }
}

impl std::ops::Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        IntPoly::mul(self, rhs)
    }
}

impl std::ops::Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::neg(self)
    }
}

/// Multiplicity tuple attached to a vertex selection: entry `i` is the number
/// of rooted-graph copies coalesced at the selection's `i`-th vertex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(Vec<u32>);

impl Signature {
    /// Entries must be positive; order is preserved as given.
    pub fn new(entries: Vec<u32>) -> Result<Self, PolyError> {
        if entries.contains(&0) {
            return Err(PolyError::NonPositiveSignatureEntry);
        }
        Ok(Signature(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }

    pub fn gcd(&self) -> u32 {
        self.0.iter().fold(0u32, |g, &a| g.gcd(&a))
    }

    /// Nonincreasing with coprime entries; the normal form produced by the
    /// search enumerator.
    pub fn is_normalized(&self) -> bool {
        !self.0.is_empty() && self.0.windows(2).all(|w| w[0] >= w[1]) && self.gcd() == 1
    }

    /// Maximal runs of equal entries as `(start, len)` position ranges.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i + 1;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            out.push((i, j - i));
            i = j;
        }
        out
    }

    /// Elementary symmetric polynomial `e_l` of the entries; the leading
    /// coefficient of the degree-`n-l` Hosoya vector component.
    pub fn elementary_symmetric(&self, l: usize) -> BigInt {
        let mut e = vec![BigInt::zero(); l + 1];
        e[0] = BigInt::one();
        for &a in &self.0 {
            let a = BigInt::from(a);
            for i in (1..=l).rev() {
                let add = &e[i - 1] * &a;
                e[i] += add;
            }
        }
        e.pop().unwrap()
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature{:?}", self.0)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}
