//! Sparse multivariate polynomials over the indeterminates
//! `x, Q_1..Q_k, R_1..R_k`.
//!
//! These carry symbolic coalescence characteristic polynomials before the
//! rooted graph is known: `Q_i` stands for `P(G_i) - x P(G_i - r_i)` and
//! `R_i` for `P(G_i - r_i)`. Arity is `1 + 2k`; the collapsed single-graph
//! form is arity 3 with layout `[x, Q, R]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::{IntPoly, PolyError};

#[derive(Clone, PartialEq, Eq)]
pub struct SymPoly {
    arity: usize,
    /// Exponent vector (length `arity`, layout `[x, Q_1..Q_k, R_1..R_k]`)
    /// to nonzero coefficient.
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl SymPoly {
    pub fn zero(arity: usize) -> Self {
        assert!(
            arity >= 1 && arity % 2 == 1,
            "arity must be odd: x plus Q/R pairs"
        );
        SymPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of Q/R pairs.
    pub fn pairs(&self) -> usize {
        (self.arity - 1) / 2
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, coeff: BigInt) {
        assert_eq!(exponents.len(), self.arity, "exponent vector length");
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            // re-borrow to remove; key needed
            let key: Vec<u32> = self
                .terms
                .iter()
                .find(|(_, c)| c.is_zero())
                .map(|(k, _)| k.clone())
                .unwrap();
            self.terms.remove(&key);
        }
    }

    /// Adds `poly(x) * Q^qexp * R^rexp` into an arity-3 polynomial; the
    /// building block for collapsed coalescence expansions.
    pub fn add_x_poly_qr(&mut self, poly: &IntPoly, coeff: &BigInt, qexp: u32, rexp: u32) {
        assert_eq!(self.arity, 3);
        for (deg, c) in poly.coeffs().iter().enumerate() {
            if !c.is_zero() {
                self.add_term(vec![deg as u32, qexp, rexp], c * coeff);
            }
        }
    }

    pub fn add(&self, rhs: &SymPoly) -> SymPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in add");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, rhs: &SymPoly) -> SymPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in mul");
        let mut out = SymPoly::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero(self.arity);
        }
        SymPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    /// Identifies all `Q_i` with one `Q` and all `R_i` with one `R`,
    /// producing the arity-3 form.
    pub fn collapse_qr(&self) -> SymPoly {
        let k = self.pairs();
        let mut out = SymPoly::zero(3);
        for (e, c) in &self.terms {
            let q: u32 = e[1..1 + k].iter().sum();
            let r: u32 = e[1 + k..].iter().sum();
            out.add_term(vec![e[0], q, r], c.clone());
        }
        out
    }

    /// Substitutes concrete polynomials in `x` for every `Q_i` and `R_i`.
    ///
    /// `q_values` and `r_values` must each have one entry per Q/R pair.
    pub fn substitute(
        &self,
        q_values: &[IntPoly],
        r_values: &[IntPoly],
    ) -> Result<IntPoly, PolyError> {
        let k = self.pairs();
        if q_values.len() != k || r_values.len() != k {
            return Err(PolyError::ArityMismatch {
                expected: 1 + 2 * q_values.len().max(r_values.len()),
                got: self.arity,
            });
        }
        // Powers recur across terms; memoize per indeterminate.
        let mut pow_cache: HashMap<(usize, u32), IntPoly> = HashMap::new();
        let powered =
            |slot: usize, base: &IntPoly, e: u32, cache: &mut HashMap<(usize, u32), IntPoly>| {
                cache
                    .entry((slot, e))
                    .or_insert_with(|| base.pow(e))
                    .clone()
            };
        let mut acc = IntPoly::zero();
        for (e, c) in &self.terms {
            let mut term = IntPoly::monomial(c.clone(), e[0] as usize);
            for i in 0..k {
                if e[1 + i] > 0 {
                    term = term.mul(&powered(1 + i, &q_values[i], e[1 + i], &mut pow_cache));
                }
                if e[1 + k + i] > 0 {
                    term = term.mul(&powered(
                        1 + k + i,
                        &r_values[i],
                        e[1 + k + i],
                        &mut pow_cache,
                    ));
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let k = self.pairs();
        let push_power = |parts: &mut Vec<String>, name: String, exp: u32| {
            if exp == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{exp}"));
            }
        };
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let negative = c < &BigInt::ZERO;
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let mag = c.magnitude();
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || e.iter().all(|&x| x == 0) {
                parts.push(mag.to_string());
            }
            if e[0] > 0 {
                push_power(&mut parts, "x".to_string(), e[0]);
            }
            for i in 0..k {
                if e[1 + i] > 0 {
                    let name = if k == 1 {
                        "Q".to_string()
                    } else {
                        format!("Q{}", i + 1)
                    };
                    push_power(&mut parts, name, e[1 + i]);
                }
            }
            for i in 0..k {
                if e[1 + k + i] > 0 {
                    let name = if k == 1 {
                        "R".to_string()
                    } else {
                        format!("R{}", i + 1)
                    };
                    push_power(&mut parts, name, e[1 + k + i]);
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymPoly[{}]({})", self.arity, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn ip(desc: &[i64]) -> IntPoly {
        IntPoly::from_desc_i64(desc)
    }

    #[test]
    fn add_term_merges_and_drops_zero() {
        let mut s = SymPoly::zero(3);
        s.add_term(vec![1, 0, 1], BigInt::from(2));
        s.add_term(vec![1, 0, 1], BigInt::from(-2));
        assert!(s.is_zero());
    }

    #[test]
    fn substitute_recovers_host_charpoly_shape() {
        // x*R + Q with Q = pg - x*pgr, R = pgr gives back pg.
        let pg = ip(&[1, 0, -3, -2]); // triangle
        let pgr = ip(&[1, 0, -1]); // edge
        let q = pg.sub(&pgr.mul_xpow(1));
        let mut s = SymPoly::zero(3);
        s.add_term(vec![1, 0, 1], BigInt::one());
        s.add_term(vec![0, 1, 0], BigInt::one());
        assert_eq!(s.substitute(&[q], &[pgr]).unwrap(), pg);
    }

    #[test]
    fn substitute_checks_arity() {
        let s = SymPoly::zero(5);
        let err = s
            .substitute(&[IntPoly::one()], &[IntPoly::one()])
            .unwrap_err();
        assert!(matches!(err, PolyError::ArityMismatch { .. }));
    }

    #[test]
    fn collapse_merges_pairs() {
        let mut s = SymPoly::zero(5);
        s.add_term(vec![0, 1, 0, 2, 0], BigInt::from(3)); // Q1 R1^2
        s.add_term(vec![0, 0, 1, 1, 1], BigInt::from(4)); // Q2 R1 R2
        let c = s.collapse_qr();
        let mut expect = SymPoly::zero(3);
        expect.add_term(vec![0, 1, 2], BigInt::from(7));
        assert_eq!(c, expect);
    }

    fn small_sym(arity: usize) -> impl Strategy<Value = SymPoly> {
        prop::collection::vec((prop::collection::vec(0u32..3, arity), -4i64..=4), 0..5).prop_map(
            move |terms| {
                let mut s = SymPoly::zero(arity);
                for (e, c) in terms {
                    s.add_term(e, BigInt::from(c));
                }
                s
            },
        )
    }

    fn small_ip() -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-3i64..=3, 0..4)
            .prop_map(|v| IntPoly::from_coeffs(v.into_iter().map(BigInt::from).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn substitution_is_ring_homomorphism(
            a in small_sym(3), b in small_sym(3), q in small_ip(), r in small_ip()
        ) {
            let qs = [q];
            let rs = [r];
            let lhs_mul = a.mul(&b).substitute(&qs, &rs).unwrap();
            let rhs_mul = a.substitute(&qs, &rs).unwrap().mul(&b.substitute(&qs, &rs).unwrap());
            prop_assert_eq!(lhs_mul, rhs_mul);
            let lhs_add = a.add(&b).substitute(&qs, &rs).unwrap();
            let rhs_add = a.substitute(&qs, &rs).unwrap().add(&b.substitute(&qs, &rs).unwrap());
            prop_assert_eq!(lhs_add, rhs_add);
        }

        #[test]
        fn collapse_commutes_with_uniform_substitution(
            a in small_sym(5), q in small_ip(), r in small_ip()
        ) {
            let collapsed = a.collapse_qr().substitute(std::slice::from_ref(&q), std::slice::from_ref(&r)).unwrap();
            let direct = a.substitute(&[q.clone(), q], &[r.clone(), r]).unwrap();
            prop_assert_eq!(collapsed, direct);
        }
    }
}
