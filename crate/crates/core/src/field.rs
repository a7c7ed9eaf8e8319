//! Exact arithmetic in GF(p^k) for small odd p and k <= 8.
//!
//! Elements are stored as a raw index `a0 + a1*p + ... + a_{k-1}*p^{k-1}`
//! of their coefficient vector in the polynomial basis `1, t, ..., t^{k-1}`.
//! The `*_raw` methods on [`FieldCtx`] operate on these indices directly and
//! are what the symbolic kernel and the enumerators use in their inner loops.
//! [`FieldElement`] wraps an index together with its context.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

/// Largest field order for which log/exp tables are built.
const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension degree {0} is out of range (1..=8)")]
    DegreeTooLarge(usize),
    #[error("field of order {p}^{k} does not fit the element encoding")]
    FieldTooLarge { p: u64, k: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires a degree-2 field, got degree {0}")]
    WrongDegree(usize),
    #[error("operands belong to different fields")]
    ContextMismatch,
    #[error("pole at input: {0} vanishes")]
    PoleAtInput(&'static str),
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, FieldError>;

pub(crate) fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Field context: characteristic, degree, modulus and lookup tables.
pub struct FieldCtx {
    p: u32,
    k: usize,
    modulus: Vec<u32>,
    order: u32,
    pows: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    canonical: Vec<u32>,
    rank: Vec<u32>,
    frob: Vec<u32>,
    wp_fibers: OnceLock<Vec<Vec<u32>>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Builds GF(p^k) with the lexicographically smallest monic irreducible modulus.
pub fn make_field(p: u64, k: usize) -> Result<Arc<FieldCtx>> {
    FieldCtx::new(p, k)
}

impl FieldCtx {
    pub fn new(p: u64, k: usize) -> Result<Arc<FieldCtx>> {
        if !is_odd_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        if k == 0 || k > 8 {
            return Err(FieldError::DegreeTooLarge(k));
        }
        let order = (p as u128).pow(k as u32);
        if order > u32::MAX as u128 / 2 {
            return Err(FieldError::FieldTooLarge { p, k });
        }
        let p = p as u32;
        let order = order as u32;
        let modulus = smallest_irreducible(p, k);
        let mut pows = Vec::with_capacity(k);
        let mut acc = 1u32;
        for _ in 0..k {
            pows.push(acc);
            acc = acc.wrapping_mul(p);
        }
        let mut ctx = FieldCtx {
            p,
            k,
            modulus,
            order,
            pows,
            exp: Vec::new(),
            log: Vec::new(),
            canonical: Vec::new(),
            rank: Vec::new(),
            frob: Vec::new(),
            wp_fibers: OnceLock::new(),
        };
        if (order as u64) <= TABLE_LIMIT {
            ctx.build_tables();
        }
        Ok(Arc::new(ctx))
    }

    fn build_tables(&mut self) {
        let q = self.order;
        let gen = self.find_primitive();
        let mut exp = vec![0u32; q as usize - 1];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = self.mul_slow(x, gen);
        }
        self.exp = exp;
        self.log = log;

        let mut canonical: Vec<u32> = (0..q).collect();
        canonical.sort_by(|&a, &b| self.cmp_canonical(a, b));
        let mut rank = vec![0u32; q as usize];
        for (i, &v) in canonical.iter().enumerate() {
            rank[v as usize] = i as u32;
        }
        self.canonical = canonical;
        self.rank = rank;
        self.frob = (0..q).map(|x| self.pow_raw(x, self.p as u64)).collect();
    }

    fn find_primitive(&self) -> u32 {
        let q1 = (self.order - 1) as u64;
        let mut primes = Vec::new();
        let mut m = q1;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                primes.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        (1..self.order)
            .find(|&g| primes.iter().all(|&r| self.pow_slow(g, q1 / r) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Modulus coefficients, constant term first; monic of length `k + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => var,
                _ => format!("{c}*{var}"),
            });
        }
        terms.join("+")
    }

    // ---- raw index arithmetic -------------------------------------------

    pub fn digits(&self, x: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k);
        let mut x = x;
        for _ in 0..self.k {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    pub fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter()
            .zip(&self.pows)
            .map(|(&c, &w)| (c % self.p) * w)
            .sum()
    }

    pub fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for &w in &self.pows {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * w;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    pub fn neg_raw(&self, a: u32) -> u32 {
        let mut a = a;
        let mut out = 0;
        for &w in &self.pows {
            let d = a % self.p;
            out += ((self.p - d) % self.p) * w;
            a /= self.p;
        }
        out
    }

    pub fn sub_raw(&self, a: u32, b: u32) -> u32 {
        self.add_raw(a, self.neg_raw(b))
    }

    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.exp.is_empty() {
            return self.mul_slow(a, b);
        }
        let q1 = self.order - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= q1 { s - q1 } else { s }) as usize]
    }

    pub fn inv_raw(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if self.exp.is_empty() {
            return Some(self.pow_slow(a, self.order as u64 - 2));
        }
        let q1 = self.order - 1;
        let l = self.log[a as usize];
        Some(self.exp[((q1 - l) % q1) as usize])
    }

    pub fn pow_raw(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if self.exp.is_empty() {
            return self.pow_slow(a, e);
        }
        let q1 = (self.order - 1) as u64;
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % q1)) % q1) as usize]
    }

    /// Frobenius `x -> x^p`.
    pub fn frob_raw(&self, a: u32) -> u32 {
        if self.frob.is_empty() {
            self.pow_slow(a, self.p as u64)
        } else {
            self.frob[a as usize]
        }
    }

    /// `x^p + x`.
    pub fn wp_raw(&self, a: u32) -> u32 {
        self.add_raw(self.frob_raw(a), a)
    }

    /// Embedding of an integer into the prime subfield.
    pub fn int_raw(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Residue of a prime-subfield element, `None` if `a` is not in GF(p).
    pub fn prime_value(&self, a: u32) -> Option<u32> {
        (a < self.p).then_some(a)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let da = self.digits(a);
        let db = self.digits(b);
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * self.k];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for deg in (self.k..2 * self.k).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &m) in self.modulus[..self.k].iter().enumerate() {
                let t = deg - self.k + i;
                prod[t] = (prod[t] + (p - c) * m as u64) % p;
            }
        }
        let d: Vec<u32> = prod[..self.k].iter().map(|&c| c as u32).collect();
        self.from_digits(&d)
    }

    fn pow_slow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    /// Canonical order: lexicographic on `(a0, a1, ..., a_{k-1})`.
    pub fn cmp_canonical(&self, a: u32, b: u32) -> Ordering {
        if !self.rank.is_empty() {
            return self.rank[a as usize].cmp(&self.rank[b as usize]);
        }
        self.digits(a).cmp(&self.digits(b))
    }

    /// All raw elements in canonical order.
    pub fn raw_elements(&self) -> Vec<u32> {
        if !self.canonical.is_empty() {
            return self.canonical.clone();
        }
        let mut v: Vec<u32> = (0..self.order).collect();
        v.sort_by(|&a, &b| self.cmp_canonical(a, b));
        v
    }

    /// Preimages of `w` under `y -> y^p + y`, canonical order.
    pub fn wp_preimages_raw(&self, w: u32) -> &[u32] {
        let fibers = self.wp_fibers.get_or_init(|| {
            let mut fibers = vec![Vec::new(); self.order as usize];
            for y in self.raw_elements() {
                fibers[self.wp_raw(y) as usize].push(y);
            }
            fibers
        });
        &fibers[w as usize]
    }

    /// Trace-zero members `{a : a^p = -a}` in canonical order.
    pub fn trace_zero_raw(&self) -> Vec<u32> {
        self.wp_preimages_raw(0).to_vec()
    }

    pub fn format_raw(&self, a: u32) -> String {
        let d = self.digits(a);
        let mut terms = Vec::new();
        for (i, &c) in d.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => var,
                _ => format!("{c}*{var}"),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }

    /// Parses `a0+a1*t+a2*t^2`, also accepting `2t`, `-t` and integer literals.
    pub fn parse_raw(&self, s: &str) -> Result<u32> {
        let err = || FieldError::Parse(s.to_string());
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err());
        }
        let p = self.p as i64;
        let mut digits = vec![0i64; self.k];
        let mut rest = cleaned.as_str();
        while !rest.is_empty() {
            let mut sign = 1i64;
            match rest.as_bytes()[0] {
                b'+' => rest = &rest[1..],
                b'-' => {
                    sign = -1;
                    rest = &rest[1..];
                }
                _ => {}
            }
            let end = rest[1.min(rest.len())..]
                .find(['+', '-'])
                .map(|i| i + 1)
                .unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            if term.is_empty() {
                return Err(err());
            }
            let (coef, power) = match term.find('t') {
                None => (term.parse::<i64>().map_err(|_| err())?, 0usize),
                Some(pos) => {
                    let c = term[..pos].trim_end_matches('*');
                    let c = if c.is_empty() {
                        1
                    } else {
                        c.parse::<i64>().map_err(|_| err())?
                    };
                    let e = &term[pos + 1..];
                    let e = if e.is_empty() {
                        1
                    } else {
                        e.strip_prefix('^')
                            .ok_or_else(err)?
                            .parse::<usize>()
                            .map_err(|_| err())?
                    };
                    (c, e)
                }
            };
            if power >= self.k {
                // reduce t^power through the modulus
                let mut x = 1u32;
                let t = if self.k == 1 {
                    self.neg_raw(self.modulus[0])
                } else {
                    self.pows[1]
                };
                for _ in 0..power {
                    x = self.mul_raw(x, t);
                }
                let d = self.digits(self.mul_raw(x, self.int_raw(sign * coef)));
                for (slot, v) in digits.iter_mut().zip(d) {
                    *slot += v as i64;
                }
            } else {
                digits[power] += sign * coef;
            }
        }
        let d: Vec<u32> = digits.iter().map(|v| v.rem_euclid(p) as u32).collect();
        Ok(self.from_digits(&d))
    }

    // ---- element-level API ----------------------------------------------

    pub fn element(self: &Arc<Self>, raw: u32) -> FieldElement {
        debug_assert!(raw < self.order);
        FieldElement {
            ctx: Arc::clone(self),
            raw,
        }
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        self.element(0)
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.element(1)
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> FieldElement {
        self.element(self.int_raw(v))
    }

    pub fn from_coeffs(self: &Arc<Self>, coeffs: &[u32]) -> FieldElement {
        let mut d = coeffs.to_vec();
        d.resize(self.k, 0);
        self.element(self.from_digits(&d))
    }

    pub fn parse(self: &Arc<Self>, s: &str) -> Result<FieldElement> {
        Ok(self.element(self.parse_raw(s)?))
    }

    /// The generator `t` of the polynomial basis.
    pub fn t(self: &Arc<Self>) -> FieldElement {
        if self.k == 1 {
            self.element(self.neg_raw(self.modulus[0]))
        } else {
            self.element(self.pows[1])
        }
    }

    /// Every element, canonical order.
    pub fn elements(self: &Arc<Self>) -> Vec<FieldElement> {
        self.raw_elements()
            .into_iter()
            .map(|r| self.element(r))
            .collect()
    }

    pub fn trace_zero_set(self: &Arc<Self>) -> Result<TraceZeroSet> {
        if self.k != 2 {
            return Err(FieldError::WrongDegree(self.k));
        }
        Ok(TraceZeroSet {
            elements: self
                .trace_zero_raw()
                .into_iter()
                .map(|r| self.element(r))
                .collect(),
        })
    }

    /// All `y` in this field with `y^p + y = w`.
    pub fn artin_schreier_solve(self: &Arc<Self>, w: &FieldElement) -> Result<Vec<FieldElement>> {
        self.check(w)?;
        Ok(self
            .wp_preimages_raw(w.raw)
            .iter()
            .map(|&r| self.element(r))
            .collect())
    }

    /// Checks `xi^{p+1} / (xi^p + xi) = Nm(xi)/Tr(xi)` in `F_p^*` over all of
    /// `F_{p^2}` minus the trace-zero set.
    pub fn check_norm_trace_identity(self: &Arc<Self>) -> Result<NormTraceReport> {
        if self.k != 2 {
            return Err(FieldError::WrongDegree(self.k));
        }
        let mut checked = 0;
        let mut ratios = std::collections::BTreeSet::new();
        for xi in self.elements() {
            let wp = xi.wp();
            if wp.is_zero() {
                continue;
            }
            checked += 1;
            let (tr, nm) = trace_norm(&xi)?;
            let lhs = xi.pow((self.p + 1) as u64).div(&wp)?;
            let rhs = nm.div(&tr)?;
            let ok = lhs == rhs && rhs.in_prime_field() && !rhs.is_zero();
            if !ok {
                return Ok(NormTraceReport {
                    p: self.p,
                    checked,
                    ratios: ratios.into_iter().collect(),
                    passed: false,
                    counterexample: Some(xi.to_string()),
                });
            }
            ratios.insert(rhs.raw);
        }
        Ok(NormTraceReport {
            p: self.p,
            checked,
            ratios: ratios.into_iter().collect(),
            passed: true,
            counterexample: None,
        })
    }

    fn check(self: &Arc<Self>, x: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(self, &x.ctx) {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }
}

fn smallest_irreducible(p: u32, k: usize) -> Vec<u32> {
    // Candidates ordered by (c_{k-1}, ..., c_0); index i enumerates that order.
    let total = (p as u64).pow(k as u32);
    for i in 0..total {
        let mut coeffs = vec![0u32; k + 1];
        coeffs[k] = 1;
        let mut x = i;
        for j in 0..k {
            coeffs[j] = (x % p as u64) as u32;
            x /= p as u64;
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

/// Brute-force irreducibility: no monic factor of degree `1..=deg/2`.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for i in 0..count {
            let mut g = vec![0u32; d + 1];
            g[d] = 1;
            let mut x = i;
            for slot in g.iter_mut().take(d) {
                *slot = (x % p as u64) as u32;
                x /= p as u64;
            }
            if poly_rem_is_zero(f, &g, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(f: &[u32], g: &[u32], p: u32) -> bool {
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    let p = p as u64;
    for top in (dg..r.len()).rev() {
        let c = r[top] % p;
        if c == 0 {
            continue;
        }
        for (i, &gc) in g.iter().enumerate() {
            let idx = top - dg + i;
            r[idx] = (r[idx] + (p - c) * gc as u64 % p) % p;
        }
    }
    r.iter().all(|&c| c % p == 0)
}

/// An element of GF(p^k) bound to its field context.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Arc<FieldCtx>,
    raw: u32,
}

impl FieldElement {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn raw(&self) -> u32 {
        self.raw
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.ctx.digits(self.raw)
    }

    pub fn is_zero(&self) -> bool {
        self.raw == 0
    }

    pub fn in_prime_field(&self) -> bool {
        self.raw < self.ctx.p
    }

    fn same(&self, other: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(FieldError::ContextMismatch)
        }
    }

    fn with(&self, raw: u32) -> FieldElement {
        FieldElement {
            ctx: Arc::clone(&self.ctx),
            raw,
        }
    }

    pub fn try_add(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same(o)?;
        Ok(self.with(self.ctx.add_raw(self.raw, o.raw)))
    }

    pub fn try_sub(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same(o)?;
        Ok(self.with(self.ctx.sub_raw(self.raw, o.raw)))
    }

    pub fn try_mul(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same(o)?;
        Ok(self.with(self.ctx.mul_raw(self.raw, o.raw)))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement> {
        self.same(o)?;
        let inv = self.ctx.inv_raw(o.raw).ok_or(FieldError::DivisionByZero)?;
        Ok(self.with(self.ctx.mul_raw(self.raw, inv)))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        let inv = self.ctx.inv_raw(self.raw).ok_or(FieldError::DivisionByZero)?;
        Ok(self.with(inv))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.with(self.ctx.pow_raw(self.raw, e))
    }

    pub fn frobenius(&self) -> FieldElement {
        self.with(self.ctx.frob_raw(self.raw))
    }

    /// `x^p + x`.
    pub fn wp(&self) -> FieldElement {
        self.with(self.ctx.wp_raw(self.raw))
    }

    pub fn is_trace_zero(&self) -> bool {
        self.ctx.wp_raw(self.raw) == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow(u64),
    Neg,
    Inv,
}

/// Uniform entry point for binary and unary field operations.
pub fn field_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.div(b),
        ArithOp::Pow(e) => Ok(a.pow(e)),
        ArithOp::Neg => Ok(-a),
        ArithOp::Inv => a.inv(),
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) && self.raw == other.raw
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.raw.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ctx.cmp_canonical(self.raw, other.raw)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ctx.format_raw(self.raw))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self)
    }
}

impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $raw:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                assert!(
                    Arc::ptr_eq(&self.ctx, &rhs.ctx),
                    "field elements from different contexts"
                );
                self.with(self.ctx.$raw(self.raw, rhs.raw))
            }
        }
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, add_raw);
binop!(Sub, sub, sub_raw);
binop!(Mul, mul, mul_raw);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.with(self.ctx.neg_raw(self.raw))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// The `p` elements of `F_{p^2}` with `a^p = -a`.
#[derive(Debug, Clone)]
pub struct TraceZeroSet {
    elements: Vec<FieldElement>,
}

impl TraceZeroSet {
    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        x.is_trace_zero()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &FieldElement> {
        self.elements.iter().filter(|e| !e.is_zero())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Relative trace `x^p + x` and norm `x^{p+1}` from `F_{p^2}` to `F_p`.
pub fn trace_norm(x: &FieldElement) -> Result<(FieldElement, FieldElement)> {
    if x.ctx.k != 2 {
        return Err(FieldError::WrongDegree(x.ctx.k));
    }
    let p = x.ctx.p as u64;
    Ok((x.wp(), x.pow(p + 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wgh {
    Wp,
    G,
    H,
}

/// Evaluates `x^p + x`, `g(x) = x^{p+1}/(x^p+x)` or
/// `h(x) = (x^{p-1}-1)/(x^{p-1}+1)`.
pub fn eval_wgh(x: &FieldElement, which: Wgh) -> Result<FieldElement> {
    let p = x.ctx.p as u64;
    match which {
        Wgh::Wp => Ok(x.wp()),
        Wgh::G => {
            let den = x.wp();
            if den.is_zero() {
                return Err(FieldError::PoleAtInput("x^p + x"));
            }
            x.pow(p + 1).div(&den)
        }
        Wgh::H => {
            let y = x.pow(p - 1);
            let one = x.ctx.one();
            let den = &y + &one;
            if den.is_zero() {
                return Err(FieldError::PoleAtInput("x^(p-1) + 1"));
            }
            (&y - &one).div(&den)
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct NormTraceReport {
    pub p: u32,
    pub checked: usize,
    /// Distinct ratio values (raw prime-field residues), ascending.
    pub ratios: Vec<u32>,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> Arc<FieldCtx> {
        make_field(3, 2).unwrap()
    }

    #[test]
    fn modulus_choice() {
        assert_eq!(f9().modulus(), &[1, 0, 1]);
        assert_eq!(make_field(5, 2).unwrap().modulus(), &[2, 0, 1]);
        assert_eq!(make_field(3, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(make_field(2, 2).unwrap_err(), FieldError::NotOddPrime(2));
        assert_eq!(make_field(9, 2).unwrap_err(), FieldError::NotOddPrime(9));
        assert_eq!(make_field(3, 9).unwrap_err(), FieldError::DegreeTooLarge(9));
    }

    #[test]
    fn modulus_is_first_irreducible_quadratic() {
        // Oracle: x^2 + a x + b is irreducible iff it has no root in GF(p).
        for p in [3u32, 5, 7, 11] {
            let mut expected = None;
            'outer: for a in 0..p {
                for b in 0..p {
                    if (0..p).all(|x| (x * x + a * x + b) % p != 0) {
                        expected = Some(vec![b, a, 1]);
                        break 'outer;
                    }
                }
            }
            let ctx = make_field(p as u64, 2).unwrap();
            assert_eq!(Some(ctx.modulus().to_vec()), expected);
        }
    }

    #[test]
    fn arithmetic_examples() {
        let f = f9();
        let x = f.parse("1+t").unwrap();
        assert_eq!(&x * &x, f.parse("2t").unwrap());
        let a = f.parse("2+t").unwrap();
        let b = f.parse("1+2*t").unwrap();
        assert!((a + b).is_zero());
        for e in f.elements().into_iter().filter(|e| !e.is_zero()) {
            assert_eq!(e.try_mul(&e.inv().unwrap()).unwrap(), f.one());
        }
        assert_eq!(f.zero().inv().unwrap_err(), FieldError::DivisionByZero);
        let other = make_field(5, 2).unwrap();
        assert_eq!(
            f.one().try_add(&other.one()).unwrap_err(),
            FieldError::ContextMismatch
        );
    }

    #[test]
    fn slow_and_table_paths_agree() {
        let f = make_field(3, 3).unwrap();
        for a in 0..f.order() {
            for b in 0..f.order() {
                assert_eq!(f.mul_raw(a, b), f.mul_slow(a, b));
            }
        }
    }

    #[test]
    fn trace_norm_examples() {
        let f = f9();
        let (tr, nm) = trace_norm(&f.parse("1+t").unwrap()).unwrap();
        assert_eq!((tr.raw(), nm.raw()), (2, 2));
        let (tr, nm) = trace_norm(&f.zero()).unwrap();
        assert_eq!((tr.raw(), nm.raw()), (0, 0));
        let (tr, nm) = trace_norm(&f.t()).unwrap();
        assert_eq!((tr.raw(), nm.raw()), (0, 1));
        let g27 = make_field(3, 3).unwrap();
        assert_eq!(trace_norm(&g27.one()).unwrap_err(), FieldError::WrongDegree(3));
    }

    #[test]
    fn trace_zero_examples() {
        let f = f9();
        let k = f.trace_zero_set().unwrap();
        let names: Vec<String> = k.elements().iter().map(|e| e.to_string()).collect();
        assert_eq!(names, ["0", "t", "2*t"]);
        assert!(k.contains(&f.zero()));
        assert!(!k.contains(&f.one()));
    }

    #[test]
    fn artin_schreier_examples() {
        let f = f9();
        let sols = |s: &str| -> Vec<String> {
            f.artin_schreier_solve(&f.parse(s).unwrap())
                .unwrap()
                .iter()
                .map(|e| e.to_string())
                .collect()
        };
        assert_eq!(sols("1"), ["2", "2+t", "2+2*t"]);
        assert_eq!(sols("0"), ["0", "t", "2*t"]);
        assert!(sols("t").is_empty());
    }

    #[test]
    fn wgh_examples() {
        let f = f9();
        assert_eq!(eval_wgh(&f.parse("1+t").unwrap(), Wgh::G).unwrap(), f.one());
        assert_eq!(
            eval_wgh(&f.t(), Wgh::G).unwrap_err(),
            FieldError::PoleAtInput("x^p + x")
        );
        assert!(eval_wgh(&f.one(), Wgh::H).unwrap().is_zero());
    }

    #[test]
    fn norm_trace_census() {
        let r = f9().check_norm_trace_identity().unwrap();
        assert!(r.passed);
        assert_eq!(r.checked, 6);
        assert_eq!(r.ratios, vec![1, 2]);
        let r = make_field(5, 2).unwrap().check_norm_trace_identity().unwrap();
        assert!(r.passed);
        assert_eq!(r.checked, 20);
        let f = f9();
        let (tr, nm) = trace_norm(&f.one()).unwrap();
        assert_eq!(nm.div(&tr).unwrap().raw(), 2);
    }

    #[test]
    fn parse_display_roundtrip() {
        let f = make_field(5, 2).unwrap();
        for e in f.elements() {
            assert_eq!(f.parse(&e.to_string()).unwrap(), e);
        }
        assert_eq!(f.parse("-t").unwrap(), f.parse("4t").unwrap());
        assert!(f.parse("x+1").is_err());
        assert!(f.parse("").is_err());
    }
}
