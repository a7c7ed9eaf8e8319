//! Symbolic arithmetic in the tower function fields.
//!
//! An element is a fraction of polynomials over `GF(p^2)[x1]` in the
//! algebraic generators. Each algebraic generator `y_j` satisfies
//! `y_j^p = N_j/D_j - y_j` with `N_j, D_j` involving only earlier
//! generators, so every element has a reduced representative in which each
//! algebraic generator occurs with exponent `< p`. Equality is decided by
//! reducing the cross-multiplied difference.

mod mpoly;
mod upoly;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

pub use mpoly::{MPoly, Mono};
pub use upoly::UPoly;

use crate::field::{FieldCtx, FieldElement};
use crate::tower::{GeneratorId, TowerError, TowerSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("generator {0} is not part of this relation system")]
    UnknownGenerator(String),
    #[error("division by an element with zero normal form")]
    ZeroDivisor,
    #[error("divisor is not a polynomial")]
    NotPolynomial,
}

pub type Result<T> = std::result::Result<T, KernelError>;

/// A fraction `num / den`; after normalization both parts are reduced, the
/// shared `x1`-content is removed and `den` has leading coefficient one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicElement {
    pub num: MPoly,
    pub den: MPoly,
}

impl SymbolicElement {
    pub fn zero() -> Self {
        SymbolicElement {
            num: MPoly::zero(),
            den: MPoly::constant(1),
        }
    }

    pub fn from_poly(num: MPoly) -> Self {
        SymbolicElement {
            num,
            den: MPoly::constant(1),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den == MPoly::constant(1)
    }

    /// `Some(c)` if the element is a constant of `GF(p^2)`.
    pub fn as_constant(&self) -> Option<u32> {
        if self.num.is_zero() {
            return Some(0);
        }
        let n = self.num.as_upoly()?;
        if !self.is_polynomial() || !n.is_constant() {
            return None;
        }
        Some(n.0[0])
    }
}

/// Relation `y^p + y = num/den` of one algebraic generator.
#[derive(Debug, Clone)]
pub struct Relation {
    pub num: MPoly,
    pub den: MPoly,
    /// `num - den * y`, so that `den * y^p = minus_den_y`.
    minus_den_y: MPoly,
}

/// Rewrite rounds spent on one generator during a normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionStep {
    pub generator: usize,
    pub entry_max_exponent: u32,
    pub rounds: u32,
}

#[derive(Clone)]
pub struct RelationSystem {
    ctx: Arc<FieldCtx>,
    spec: TowerSpec,
    gens: Vec<GeneratorId>,
    index: HashMap<GeneratorId, usize>,
    relations: Vec<Relation>,
}

impl std::fmt::Debug for RelationSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RelationSystem")
            .field("generators", &self.generator_names())
            .finish()
    }
}

impl RelationSystem {
    /// Builds the relation system of a tower description; generator order is
    /// the description's dependency order.
    pub fn build(spec: &TowerSpec) -> Result<RelationSystem> {
        let order = spec.dependency_order()?;
        let ctx = Arc::clone(spec.ctx());
        let mut rs = RelationSystem {
            ctx,
            spec: spec.clone(),
            gens: Vec::new(),
            index: HashMap::new(),
            relations: Vec::new(),
        };
        for id in order {
            let g = spec.generator(&id).expect("ordered ids come from the spec");
            let Some(parent) = &g.parent else { continue };
            let base = rs.var(&parent.generator)?;
            let shift = rs.constant_raw(parent.shift);
            let arg = rs.add(&base, &shift);
            let rhs = rs.g_apply(&arg)?;
            let j = rs.gens.len();
            let minus_den_y = rhs.num.sub(&rhs.den.mul(&MPoly::var(j), &rs.ctx), &rs.ctx);
            rs.index.insert(id.clone(), j);
            rs.gens.push(id);
            rs.relations.push(Relation {
                num: rhs.num,
                den: rhs.den,
                minus_den_y,
            });
        }
        Ok(rs)
    }

    /// Relation system for the given generators and their ancestors only.
    pub fn build_for(spec: &TowerSpec, ids: &[GeneratorId]) -> Result<RelationSystem> {
        RelationSystem::build(&spec.restrict_to(ids)?)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }

    pub fn p(&self) -> u32 {
        self.ctx.characteristic()
    }

    /// Algebraic generators in reduction order (`x1` excluded).
    pub fn generators(&self) -> &[GeneratorId] {
        &self.gens
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.gens.iter().map(|g| g.display(&self.ctx)).collect()
    }

    pub fn relation(&self, id: &GeneratorId) -> Option<&Relation> {
        self.index_of(id).map(|j| &self.relations[j])
    }

    pub fn index_of(&self, id: &GeneratorId) -> Option<usize> {
        self.index.get(&self.spec.resolve_alias(id)).copied()
    }

    // ---- constructors ----------------------------------------------------

    pub fn x1(&self) -> SymbolicElement {
        SymbolicElement::from_poly(MPoly::from_upoly(UPoly::monomial(1, 1)))
    }

    pub fn var(&self, id: &GeneratorId) -> Result<SymbolicElement> {
        if *id == GeneratorId::x1() {
            return Ok(self.x1());
        }
        let j = self
            .index_of(id)
            .ok_or_else(|| KernelError::UnknownGenerator(id.display(&self.ctx)))?;
        Ok(SymbolicElement::from_poly(MPoly::var(j)))
    }

    pub fn constant_raw(&self, c: u32) -> SymbolicElement {
        SymbolicElement::from_poly(MPoly::constant(c))
    }

    pub fn constant(&self, c: &FieldElement) -> SymbolicElement {
        self.constant_raw(c.raw())
    }

    pub fn int(&self, v: i64) -> SymbolicElement {
        self.constant_raw(self.ctx.int_raw(v))
    }

    // ---- normal form -----------------------------------------------------

    /// Rewrites `poly` so that generator `j` has exponent `< p`; returns the
    /// result `R` and `k` with `poly = R / D_j^k`.
    fn reduce_in(&self, poly: MPoly, j: usize, trace: &mut Vec<ReductionStep>) -> (MPoly, u32) {
        let p = self.p();
        let f = &*self.ctx;
        let entry = poly.max_exponent_of(j);
        if entry < p {
            return (poly, 0);
        }
        let rel = &self.relations[j];
        let mut cur = poly;
        let mut rounds = 0;
        let mut last = entry;
        loop {
            let (low, high) = cur.split_by_exponent(j, p);
            if high.is_zero() {
                break;
            }
            // D*y^e -> (N - D*y) * y^(e-p) for e >= p, low part scaled by D
            let mut next = low.mul(&rel.den, f);
            let mut lowered = MPoly::zero();
            for (m, c) in high.terms {
                let e = m.exponent(j);
                lowered.terms.insert(m.with_exponent(j, e - p), c);
            }
            next = next.add(&lowered.mul(&rel.minus_den_y, f), f);
            cur = next;
            rounds += 1;
            let now = cur.max_exponent_of(j);
            assert!(now < last || now < p, "rewriting must lower the exponent");
            last = now;
        }
        trace.push(ReductionStep {
            generator: j,
            entry_max_exponent: entry,
            rounds,
        });
        (cur, rounds)
    }

    fn normalize_parts(&self, num: MPoly, den: MPoly, trace: &mut Vec<ReductionStep>) -> SymbolicElement {
        let f = &*self.ctx;
        if num.is_zero() {
            return SymbolicElement::zero();
        }
        let (mut num, mut den) = (num, den);
        for j in (0..self.gens.len()).rev() {
            let (a, ka) = self.reduce_in(num, j, trace);
            let (b, kb) = self.reduce_in(den, j, trace);
            let d = &self.relations[j].den;
            if ka > kb {
                num = a;
                den = b.mul(&d.pow(ka - kb, f), f);
            } else {
                num = a.mul(&d.pow(kb - ka, f), f);
                den = b;
            }
            if num.is_zero() {
                return SymbolicElement::zero();
            }
        }
        assert!(!den.is_zero(), "denominator reduced to zero");
        self.canonicalize(num, den)
    }

    fn canonicalize(&self, num: MPoly, den: MPoly) -> SymbolicElement {
        let f = &*self.ctx;
        let mut content = UPoly::zero();
        for c in num.terms.values().chain(den.terms.values()) {
            content = content.gcd(c, f);
            if content.is_constant() {
                break;
            }
        }
        let (mut num, mut den) = (num, den);
        if !content.is_constant() {
            let divide = |c: &UPoly| {
                let (q, r) = c.div_rem(&content, f);
                debug_assert!(r.is_zero());
                q
            };
            num = num.map_coeffs(divide);
            den = den.map_coeffs(divide);
        }
        let lead = den.leading().map(|(_, c)| c.lead()).unwrap_or(1);
        if lead != 1 {
            let inv = f.inv_raw(lead).expect("nonzero leading coefficient");
            num = num.scale(inv, f);
            den = den.scale(inv, f);
        }
        SymbolicElement { num, den }
    }

    pub fn normalize(&self, e: &SymbolicElement) -> SymbolicElement {
        self.normalize_parts(e.num.clone(), e.den.clone(), &mut Vec::new())
    }

    /// Normalizes and reports the rewrite rounds spent per generator.
    pub fn normalize_traced(&self, e: &SymbolicElement) -> (SymbolicElement, Vec<ReductionStep>) {
        let mut trace = Vec::new();
        let out = self.normalize_parts(e.num.clone(), e.den.clone(), &mut trace);
        (out, trace)
    }

    /// Whether every algebraic generator has exponent `< p` in both parts.
    pub fn is_reduced(&self, e: &SymbolicElement) -> bool {
        let p = self.p();
        (0..self.gens.len()).all(|j| e.num.max_exponent_of(j) < p && e.den.max_exponent_of(j) < p)
    }

    // ---- ring operations -------------------------------------------------

    pub fn add(&self, a: &SymbolicElement, b: &SymbolicElement) -> SymbolicElement {
        let f = &*self.ctx;
        if a.den == b.den {
            return self.normalize_parts(a.num.add(&b.num, f), a.den.clone(), &mut Vec::new());
        }
        let num = a.num.mul(&b.den, f).add(&b.num.mul(&a.den, f), f);
        self.normalize_parts(num, a.den.mul(&b.den, f), &mut Vec::new())
    }

    pub fn neg(&self, a: &SymbolicElement) -> SymbolicElement {
        SymbolicElement {
            num: a.num.neg(&self.ctx),
            den: a.den.clone(),
        }
    }

    pub fn sub(&self, a: &SymbolicElement, b: &SymbolicElement) -> SymbolicElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &SymbolicElement, b: &SymbolicElement) -> SymbolicElement {
        let f = &*self.ctx;
        self.normalize_parts(a.num.mul(&b.num, f), a.den.mul(&b.den, f), &mut Vec::new())
    }

    pub fn pow(&self, a: &SymbolicElement, e: u32) -> SymbolicElement {
        let mut acc = self.int(1);
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a / d` for an arbitrary element `d` with nonzero normal form.
    pub fn div(&self, a: &SymbolicElement, d: &SymbolicElement) -> Result<SymbolicElement> {
        let d = self.normalize(d);
        if d.num.is_zero() {
            return Err(KernelError::ZeroDivisor);
        }
        let f = &*self.ctx;
        Ok(self.normalize_parts(a.num.mul(&d.den, f), a.den.mul(&d.num, f), &mut Vec::new()))
    }

    /// `a / d` where `d` is a polynomial expression.
    pub fn divide_simple(&self, a: &SymbolicElement, d: &SymbolicElement) -> Result<SymbolicElement> {
        if !d.is_polynomial() {
            return Err(KernelError::NotPolynomial);
        }
        self.div(a, d)
    }

    /// `e^p`, computed by Frobenius on coefficients and exponent scaling.
    pub fn frobenius(&self, e: &SymbolicElement) -> SymbolicElement {
        let f = &*self.ctx;
        self.normalize_parts(e.num.frobenius(f), e.den.frobenius(f), &mut Vec::new())
    }

    /// `e^p + e`.
    pub fn wp_apply(&self, e: &SymbolicElement) -> SymbolicElement {
        self.add(&self.frobenius(e), e)
    }

    /// `g(y) = y^{p+1} / (y^p + y)`.
    pub fn g_apply(&self, y: &SymbolicElement) -> Result<SymbolicElement> {
        let yp = self.frobenius(y);
        let w = self.add(&yp, y);
        self.div(&self.mul(&yp, y), &w)
    }

    /// `h(y) = (y^{p-1} - 1) / (y^{p-1} + 1)`.
    pub fn h_apply(&self, y: &SymbolicElement) -> Result<SymbolicElement> {
        let t = self.pow(y, self.p() - 1);
        let one = self.int(1);
        self.div(&self.sub(&t, &one), &self.add(&t, &one))
    }

    pub fn is_zero(&self, e: &SymbolicElement) -> bool {
        self.normalize(e).num.is_zero()
    }

    /// Cross-multiplied equality test.
    pub fn equals(&self, a: &SymbolicElement, b: &SymbolicElement) -> bool {
        let f = &*self.ctx;
        let diff = a.num.mul(&b.den, f).sub(&b.num.mul(&a.den, f), f);
        self.normalize_parts(diff, MPoly::constant(1), &mut Vec::new())
            .num
            .is_zero()
    }

    // ---- evaluation ------------------------------------------------------

    /// Values of the algebraic generators in reduction order, looked up by id.
    pub fn values_from(&self, lookup: impl Fn(&GeneratorId) -> Option<u32>) -> Option<Vec<u32>> {
        self.gens.iter().map(lookup).collect()
    }

    /// Evaluates at `x1 = x1_value` and generator values `gens`; `None` if
    /// the denominator vanishes there.
    pub fn eval(&self, e: &SymbolicElement, x1_value: u32, gens: &[u32]) -> Option<u32> {
        let f = &*self.ctx;
        let d = e.den.eval(x1_value, gens, f);
        let inv = f.inv_raw(d)?;
        Some(f.mul_raw(e.num.eval(x1_value, gens, f), inv))
    }

    /// Whether the relations hold at the given values.
    pub fn relations_hold(&self, x1_value: u32, gens: &[u32]) -> bool {
        let f = &*self.ctx;
        self.relations.iter().enumerate().all(|(j, rel)| {
            let den = rel.den.eval(x1_value, gens, f);
            let num = rel.num.eval(x1_value, gens, f);
            den != 0 && f.mul_raw(f.wp_raw(gens[j]), den) == num
        })
    }

    pub fn format(&self, e: &SymbolicElement) -> String {
        format!("({}) / ({})", self.format_poly(&e.num), self.format_poly(&e.den))
    }

    pub fn format_poly(&self, poly: &MPoly) -> String {
        if poly.is_zero() {
            return "0".into();
        }
        let f = &*self.ctx;
        let mut terms = Vec::new();
        for (m, c) in poly.terms.iter().rev() {
            let coeff: Vec<String> = c
                .0
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &a)| a != 0)
                .map(|(i, &a)| match i {
                    0 => format!("({})", f.format_raw(a)),
                    1 => format!("({})*x1", f.format_raw(a)),
                    _ => format!("({})*x1^{i}", f.format_raw(a)),
                })
                .collect();
            let mut parts = vec![format!("[{}]", coeff.join("+"))];
            for &(g, e) in &m.0 {
                let name = self.gens[g as usize].display(f);
                parts.push(if e == 1 { name } else { format!("{name}^{e}") });
            }
            terms.push(parts.join("*"));
        }
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{closure_tower, gs_tower, ClosureModel};

    fn gs3(n: usize) -> RelationSystem {
        RelationSystem::build(&gs_tower(3, n).unwrap()).unwrap()
    }

    #[test]
    fn gs_relations_match_recursion() {
        let rs = gs3(3);
        assert_eq!(rs.generator_names(), ["x2", "x3"]);
        let x1 = rs.x1();
        let x2 = rs.var(&GeneratorId::X(2)).unwrap();
        let x3 = rs.var(&GeneratorId::X(3)).unwrap();
        assert!(rs.equals(&rs.wp_apply(&x2), &rs.g_apply(&x1).unwrap()));
        assert!(rs.equals(&rs.wp_apply(&x3), &rs.g_apply(&x2).unwrap()));
        // x2 relation is x1^4 / (x1^3 + x1)
        let rel = rs.relation(&GeneratorId::X(2)).unwrap();
        let expect = rs
            .div(&rs.pow(&x1, 4), &rs.add(&rs.pow(&x1, 3), &x1))
            .unwrap();
        assert!(rs.equals(
            &SymbolicElement {
                num: rel.num.clone(),
                den: rel.den.clone()
            },
            &expect
        ));
    }

    #[test]
    fn single_generator_system() {
        let rs = RelationSystem::build(&gs_tower(3, 1).unwrap()).unwrap();
        assert!(rs.generators().is_empty());
        let x = rs.x1();
        // h(x) = (x^p - x) / (x^p + x)
        let lhs = rs.h_apply(&x).unwrap();
        let xp = rs.pow(&x, 3);
        let rhs = rs.div(&rs.sub(&xp, &x), &rs.add(&xp, &x)).unwrap();
        assert!(rs.equals(&lhs, &rhs));
        assert!(!rs.is_zero(&rs.int(1)));
    }

    #[test]
    fn one_rewrite_step() {
        let rs = gs3(2);
        let x1 = rs.x1();
        let x2 = rs.var(&GeneratorId::X(2)).unwrap();
        let cube = SymbolicElement::from_poly(MPoly::var(0).pow(3, rs.ctx()));
        let n = rs.normalize(&cube);
        assert!(rs.is_reduced(&n));
        let wpx1 = rs.add(&rs.pow(&x1, 3), &x1);
        let expect = rs
            .div(&rs.sub(&rs.pow(&x1, 4), &rs.mul(&x2, &wpx1)), &wpx1)
            .unwrap();
        assert!(rs.equals(&n, &expect));
        assert_eq!(rs.normalize(&n), n);
        let zero = rs.sub(&rs.mul(&rs.wp_apply(&x2), &wpx1), &rs.pow(&x1, 4));
        assert!(rs.is_zero(&zero));
    }

    #[test]
    fn arithmetic_examples() {
        let spec = closure_tower(3, 3, Some("t"), ClosureModel::Full).unwrap();
        let rs = RelationSystem::build(&spec).unwrap();
        let t = rs.constant(&spec.ctx().t());
        let x2 = rs.var(&GeneratorId::X(2)).unwrap();
        let prod = rs.mul(&rs.add(&x2, &t), &rs.sub(&x2, &t));
        assert!(rs.equals(&prod, &rs.add(&rs.pow(&x2, 2), &rs.int(1))));
        let a = rs.var(&GeneratorId::U(vec![spec.ctx().t().raw()])).unwrap();
        let b = rs.add(&x2, &rs.x1());
        let q = rs.div(&a, &b).unwrap();
        assert!(rs.equals(&rs.mul(&q, &b), &a));
        assert_eq!(rs.add(&rs.normalize(&a), &SymbolicElement::zero()), rs.normalize(&a));
    }

    #[test]
    fn divide_simple_cases() {
        let rs = gs3(3);
        let x1 = rs.x1();
        let x2 = rs.var(&GeneratorId::X(2)).unwrap();
        let ctx = rs.ctx().clone();
        let alpha = rs.constant(&ctx.t());
        let a2 = rs.mul(&alpha, &alpha);
        let q = rs.divide_simple(&a2, &x1).unwrap();
        assert!(rs.equals(&rs.mul(&q, &x1), &a2));
        let wpx2 = SymbolicElement::from_poly(MPoly::var(0).pow(3, &ctx).add(&MPoly::var(0), &ctx));
        assert!(rs.divide_simple(&rs.int(1), &wpx2).is_ok());
        let dead = rs.sub(&rs.wp_apply(&x2), &rs.g_apply(&x1).unwrap());
        let dead = rs.normalize(&dead);
        assert_eq!(rs.divide_simple(&x1, &dead).unwrap_err(), KernelError::ZeroDivisor);
        let frac = rs.div(&x1, &x2).unwrap();
        assert_eq!(rs.divide_simple(&x1, &frac).unwrap_err(), KernelError::NotPolynomial);
    }

    #[test]
    fn wp_on_constants() {
        let rs = gs3(2);
        let ctx = rs.ctx().clone();
        for a in ctx.trace_zero_raw() {
            assert!(rs.is_zero(&rs.wp_apply(&rs.constant_raw(a))));
        }
        assert!(!rs.is_zero(&rs.wp_apply(&rs.int(1))));
    }

    #[test]
    fn unknown_generator() {
        let rs = gs3(2);
        assert!(matches!(
            rs.var(&GeneratorId::X(5)),
            Err(KernelError::UnknownGenerator(_))
        ));
    }
}
