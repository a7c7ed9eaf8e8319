//! Sparse polynomials in the algebraic generators with coefficients in
//! `GF(q)[x1]`.

use std::collections::BTreeMap;

use super::upoly::UPoly;
use crate::field::FieldCtx;

/// Exponent vector as `(generator, exponent)` pairs, generator indices
/// strictly decreasing, exponents positive. The derived order is the lex
/// order with the highest generator most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub Vec<(u16, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(g: usize) -> Self {
        Mono(vec![(g as u16, 1)])
    }

    pub fn exponent(&self, g: usize) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| *v as usize == g)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < o.0.len() {
            let (a, b) = (self.0[i], o.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&o.0[j..]);
        Mono(out)
    }

    /// Same monomial with generator `g` set to exponent `e`.
    pub fn with_exponent(&self, g: usize, e: u32) -> Mono {
        let mut out: Vec<(u16, u32)> = self.0.iter().copied().filter(|(v, _)| *v as usize != g).collect();
        if e > 0 {
            let pos = out.iter().position(|(v, _)| (*v as usize) < g).unwrap_or(out.len());
            out.insert(pos, (g as u16, e));
        }
        Mono(out)
    }

    pub fn scale_exponents(&self, k: u32) -> Mono {
        Mono(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }

    pub fn max_exponent(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).max().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    pub terms: BTreeMap<Mono, UPoly>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn from_upoly(c: UPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        MPoly { terms }
    }

    pub fn constant(c: u32) -> Self {
        MPoly::from_upoly(UPoly::constant(c))
    }

    pub fn var(g: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Mono::var(g), UPoly::constant(1));
        MPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Mono, c: UPoly, f: &FieldCtx) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c, f);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &MPoly, f: &FieldCtx) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone(), f);
        }
        out
    }

    pub fn neg(&self, f: &FieldCtx) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg(f)))
                .collect(),
        }
    }

    pub fn sub(&self, o: &MPoly, f: &FieldCtx) -> MPoly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.neg(f), f);
        }
        out
    }

    pub fn mul(&self, o: &MPoly, f: &FieldCtx) -> MPoly {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1.mul(c2, f), f);
            }
        }
        out
    }

    pub fn scale_upoly(&self, c: &UPoly, f: &FieldCtx) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a.mul(c, f)))
                .collect(),
        }
    }

    pub fn scale(&self, c: u32, f: &FieldCtx) -> MPoly {
        self.scale_upoly(&UPoly::constant(c), f)
    }

    pub fn pow(&self, e: u32, f: &FieldCtx) -> MPoly {
        let mut acc = MPoly::constant(1);
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    /// `self^p` via Frobenius on coefficients and exponent scaling.
    pub fn frobenius(&self, f: &FieldCtx) -> MPoly {
        let p = f.characteristic();
        let mut out = MPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.scale_exponents(p), c.frobenius(f), f);
        }
        out
    }

    pub fn max_exponent_of(&self, g: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(g)).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Mono, &UPoly)> {
        self.terms.iter().next_back()
    }

    /// Whether only the empty monomial occurs.
    pub fn is_upoly(&self) -> bool {
        self.terms.keys().all(Mono::is_one)
    }

    pub fn as_upoly(&self) -> Option<UPoly> {
        if self.is_zero() {
            return Some(UPoly::zero());
        }
        if self.is_upoly() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms.keys().map(Mono::max_exponent).max().unwrap_or(0)
    }

    /// Highest `x1` degree among all coefficients.
    pub fn x1_degree(&self) -> usize {
        self.terms
            .values()
            .filter_map(UPoly::degree)
            .max()
            .unwrap_or(0)
    }

    /// Splits into `(part with exponent of g below bound, remaining part)`.
    pub fn split_by_exponent(&self, g: usize, bound: u32) -> (MPoly, MPoly) {
        let mut low = MPoly::zero();
        let mut high = MPoly::zero();
        for (m, c) in &self.terms {
            if m.exponent(g) < bound {
                low.terms.insert(m.clone(), c.clone());
            } else {
                high.terms.insert(m.clone(), c.clone());
            }
        }
        (low, high)
    }

    pub fn eval(&self, x1: u32, gens: &[u32], f: &FieldCtx) -> u32 {
        let mut acc = 0;
        for (m, c) in &self.terms {
            let mut v = c.eval(x1, f);
            for &(g, e) in &m.0 {
                v = f.mul_raw(v, f.pow_raw(gens[g as usize], e as u64));
            }
            acc = f.add_raw(acc, v);
        }
        acc
    }

    pub fn map_coeffs(&self, mut op: impl FnMut(&UPoly) -> UPoly) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), op(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mono_order_is_lex_highest_first() {
        let a = Mono(vec![(3, 1)]);
        let b = Mono(vec![(2, 5), (0, 7)]);
        assert!(a > b);
        let c = Mono(vec![(3, 1), (1, 1)]);
        let d = Mono(vec![(3, 1), (0, 5)]);
        assert!(c > d && c > a);
        assert_eq!(a.mul(&b), Mono(vec![(3, 1), (2, 5), (0, 7)]));
        assert_eq!(c.with_exponent(1, 0), a);
        assert_eq!(a.with_exponent(2, 2), Mono(vec![(3, 1), (2, 2)]));
    }
}
