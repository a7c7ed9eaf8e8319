//! Dense univariate polynomials in `x1` over GF(q), raw coefficient indices.

use crate::field::FieldCtx;

/// Coefficients lowest degree first; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly(pub Vec<u32>);

impl UPoly {
    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn constant(c: u32) -> Self {
        if c == 0 {
            UPoly::zero()
        } else {
            UPoly(vec![c])
        }
    }

    pub fn monomial(c: u32, deg: usize) -> Self {
        if c == 0 {
            return UPoly::zero();
        }
        let mut v = vec![0; deg + 1];
        v[deg] = c;
        UPoly(v)
    }

    fn trim(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn add(&self, o: &UPoly, f: &FieldCtx) -> UPoly {
        let (long, short) = if self.0.len() >= o.0.len() {
            (self, o)
        } else {
            (o, self)
        };
        let mut v = long.0.clone();
        for (slot, &c) in v.iter_mut().zip(&short.0) {
            *slot = f.add_raw(*slot, c);
        }
        UPoly(v).trim()
    }

    pub fn neg(&self, f: &FieldCtx) -> UPoly {
        UPoly(self.0.iter().map(|&c| f.neg_raw(c)).collect())
    }

    pub fn sub(&self, o: &UPoly, f: &FieldCtx) -> UPoly {
        self.add(&o.neg(f), f)
    }

    pub fn scale(&self, c: u32, f: &FieldCtx) -> UPoly {
        if c == 0 {
            return UPoly::zero();
        }
        UPoly(self.0.iter().map(|&a| f.mul_raw(a, c)).collect())
    }

    pub fn mul(&self, o: &UPoly, f: &FieldCtx) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![0u32; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                if b != 0 {
                    v[i + j] = f.add_raw(v[i + j], f.mul_raw(a, b));
                }
            }
        }
        UPoly(v).trim()
    }

    /// `self^p`, computed as `sum frob(c_i) x^{i p}`.
    pub fn frobenius(&self, f: &FieldCtx) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let p = f.characteristic() as usize;
        let mut v = vec![0u32; (self.0.len() - 1) * p + 1];
        for (i, &c) in self.0.iter().enumerate() {
            v[i * p] = f.frob_raw(c);
        }
        UPoly(v)
    }

    pub fn div_rem(&self, d: &UPoly, f: &FieldCtx) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = f.inv_raw(d.lead()).expect("nonzero leading coefficient");
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![0u32; r.len() - dd];
        for top in (dd..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            let factor = f.mul_raw(c, inv);
            q[top - dd] = factor;
            for (i, &dc) in d.0.iter().enumerate() {
                let idx = top - dd + i;
                r[idx] = f.sub_raw(r[idx], f.mul_raw(factor, dc));
            }
        }
        r.truncate(dd);
        (UPoly(q).trim(), UPoly(r).trim())
    }

    pub fn monic(&self, f: &FieldCtx) -> UPoly {
        match f.inv_raw(self.lead()) {
            Some(inv) => self.scale(inv, f),
            None => UPoly::zero(),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &UPoly, f: &FieldCtx) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, x: u32, f: &FieldCtx) -> u32 {
        self.0
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add_raw(f.mul_raw(acc, x), c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn div_rem_and_gcd() {
        let f = make_field(3, 2).unwrap();
        // (x + 1)(x + 2) = x^2 + 2 over GF(3)
        let a = UPoly(vec![1, 1]);
        let b = UPoly(vec![2, 1]);
        let prod = a.mul(&b, &f);
        assert_eq!(prod, UPoly(vec![2, 0, 1]));
        let (q, r) = prod.div_rem(&a, &f);
        assert_eq!(q, b);
        assert!(r.is_zero());
        assert_eq!(prod.gcd(&a.mul(&a, &f), &f), a);
        assert_eq!(UPoly::zero().gcd(&UPoly::zero(), &f), UPoly::zero());
    }

    #[test]
    fn frobenius_matches_power() {
        let f = make_field(3, 2).unwrap();
        let a = UPoly(vec![3, 1, 4]);
        let cube = a.mul(&a, &f).mul(&a, &f);
        assert_eq!(a.frobenius(&f), cube);
    }
}
