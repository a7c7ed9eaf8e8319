//! Generator/relation descriptions of the Garcia–Stichtenoth tower `T_n` and
//! of its Galois closure over `T_1`.
//!
//! Every algebraic generator `y` carries a parent expression `z + s` with
//! `s` in the trace-zero set, and satisfies `y^p + y = g(z + s)` where
//! `g(x) = x^{p+1}/(x^p + x)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_odd_prime, make_field, FieldCtx, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("tower level must be at least {min}, got {got}")]
    LevelTooSmall { min: usize, got: usize },
    #[error("reduced closure models are only constructed at level 3, got {0}")]
    UnsupportedReducedLevel(usize),
    #[error("beta = {0} is not in the trace-zero set")]
    BetaNotTraceZero(String),
    #[error("beta must be nonzero")]
    BetaZero,
    #[error("generator relations contain a cycle")]
    CyclicDependency,
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("index vector must have length >= 3, got {0}")]
    VectorTooShort(usize),
    #[error("index entry {0} is not in the trace-zero set")]
    IndexNotTraceZero(String),
    #[error("malformed tower description: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, TowerError>;

/// Name of a tower generator: `x_i` or `u_c` with `c` a vector of raw
/// trace-zero field values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorId {
    X(usize),
    U(Vec<u32>),
}

impl GeneratorId {
    pub fn x1() -> Self {
        GeneratorId::X(1)
    }

    pub fn u(c: &[FieldElement]) -> Self {
        GeneratorId::U(c.iter().map(|e| e.raw()).collect())
    }

    pub fn display(&self, ctx: &FieldCtx) -> String {
        match self {
            GeneratorId::X(i) => format!("x{i}"),
            GeneratorId::U(c) => {
                let parts: Vec<String> = c.iter().map(|&r| ctx.format_raw(r)).collect();
                format!("u[{}]", parts.join(","))
            }
        }
    }

    /// Canonical key: all `x_i` first by index, then `u_c` by length and
    /// entrywise canonical element order.
    fn cmp_canonical(&self, other: &Self, ctx: &FieldCtx) -> Ordering {
        match (self, other) {
            (GeneratorId::X(a), GeneratorId::X(b)) => a.cmp(b),
            (GeneratorId::X(_), GeneratorId::U(_)) => Ordering::Less,
            (GeneratorId::U(_), GeneratorId::X(_)) => Ordering::Greater,
            (GeneratorId::U(a), GeneratorId::U(b)) => a.len().cmp(&b.len()).then_with(|| {
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| ctx.cmp_canonical(x, y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
        }
    }

    /// Parses `x3` or `u[t,0,2*t]`.
    pub fn parse(s: &str, ctx: &FieldCtx) -> std::result::Result<Self, FieldError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('x') {
            return rest
                .parse::<usize>()
                .ok()
                .filter(|&i| i >= 1)
                .map(GeneratorId::X)
                .ok_or_else(|| FieldError::Parse(s.to_string()));
        }
        let inner = s
            .strip_prefix("u[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| FieldError::Parse(s.to_string()))?;
        let c = inner
            .split(',')
            .map(|part| ctx.parse_raw(part))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(GeneratorId::U(c))
    }
}

/// `parent + shift`, the argument of `g` in a generator's relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentExpr {
    pub generator: GeneratorId,
    pub shift: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub id: GeneratorId,
    /// `None` only for the transcendental `x1`.
    pub parent: Option<ParentExpr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Gs,
    ClosureFull,
    ClosureReduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureModel {
    Full,
    Reduced,
}

#[derive(Clone)]
pub struct TowerSpec {
    ctx: Arc<FieldCtx>,
    n: usize,
    variant: Variant,
    beta: Option<u32>,
    generators: Vec<Generator>,
}

impl fmt::Debug for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self
            .generators
            .iter()
            .map(|g| g.id.display(&self.ctx))
            .collect();
        f.debug_struct("TowerSpec")
            .field("p", &self.p())
            .field("n", &self.n)
            .field("variant", &self.variant)
            .field("generators", &ids)
            .finish()
    }
}

fn field_for(p: u64) -> Result<Arc<FieldCtx>> {
    if !is_odd_prime(p) {
        return Err(FieldError::NotOddPrime(p).into());
    }
    Ok(make_field(p, 2)?)
}

/// The chain `x1 -> x2 -> ... -> xn` with `x_{i+1}^p + x_{i+1} = g(x_i)`.
pub fn gs_tower(p: u64, n: usize) -> Result<TowerSpec> {
    let ctx = field_for(p)?;
    gs_tower_in(&ctx, n)
}

pub fn gs_tower_in(ctx: &Arc<FieldCtx>, n: usize) -> Result<TowerSpec> {
    if n < 1 {
        return Err(TowerError::LevelTooSmall { min: 1, got: n });
    }
    let generators = (1..=n)
        .map(|i| Generator {
            id: GeneratorId::X(i),
            parent: (i > 1).then(|| ParentExpr {
                generator: GeneratorId::X(i - 1),
                shift: 0,
            }),
        })
        .collect();
    Ok(TowerSpec {
        ctx: Arc::clone(ctx),
        n,
        variant: Variant::Gs,
        beta: None,
        generators,
    })
}

/// Default `beta`: the canonically smallest nonzero trace-zero element.
pub fn default_beta(ctx: &Arc<FieldCtx>) -> FieldElement {
    ctx.element(ctx.trace_zero_raw()[1])
}

/// Model of the Galois closure at level `n >= 3`.
///
/// The full model adjoins `x2` and `u_c` for every trace-zero vector `c` of
/// length `1..=n-2`; `x_{m+2}` is the zero-vector node `u_{0^m}`. The reduced
/// model (level 3 only) keeps `x2`, `u_(0)` and `u_(beta)`.
pub fn closure_tower(p: u64, n: usize, beta: Option<&str>, model: ClosureModel) -> Result<TowerSpec> {
    let ctx = field_for(p)?;
    let beta = match beta {
        Some(s) => ctx.parse(s)?,
        None => default_beta(&ctx),
    };
    closure_tower_in(&ctx, n, &beta, model)
}

pub fn closure_tower_in(
    ctx: &Arc<FieldCtx>,
    n: usize,
    beta: &FieldElement,
    model: ClosureModel,
) -> Result<TowerSpec> {
    if n < 3 {
        return Err(TowerError::LevelTooSmall { min: 3, got: n });
    }
    if beta.is_zero() {
        return Err(TowerError::BetaZero);
    }
    if !beta.is_trace_zero() {
        return Err(TowerError::BetaNotTraceZero(beta.to_string()));
    }
    let kminus = ctx.trace_zero_raw();
    let mut generators = vec![
        Generator {
            id: GeneratorId::X(1),
            parent: None,
        },
        Generator {
            id: GeneratorId::X(2),
            parent: Some(ParentExpr {
                generator: GeneratorId::X(1),
                shift: 0,
            }),
        },
    ];
    let variant = match model {
        ClosureModel::Reduced => {
            if n != 3 {
                return Err(TowerError::UnsupportedReducedLevel(n));
            }
            for a in [0, beta.raw()] {
                generators.push(u_generator(&[a]));
            }
            Variant::ClosureReduced
        }
        ClosureModel::Full => {
            let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
            for _ in 1..=n - 2 {
                let mut next = Vec::with_capacity(layer.len() * kminus.len());
                for prefix in &layer {
                    for &a in &kminus {
                        let mut c = prefix.clone();
                        c.push(a);
                        generators.push(u_generator(&c));
                        next.push(c);
                    }
                }
                layer = next;
            }
            Variant::ClosureFull
        }
    };
    Ok(TowerSpec {
        ctx: Arc::clone(ctx),
        n,
        variant,
        beta: Some(beta.raw()),
        generators,
    })
}

fn u_generator(c: &[u32]) -> Generator {
    let (last, prefix) = c.split_last().expect("nonempty index vector");
    let parent = if prefix.is_empty() {
        GeneratorId::X(2)
    } else {
        GeneratorId::U(prefix.to_vec())
    };
    Generator {
        id: GeneratorId::U(c.to_vec()),
        parent: Some(ParentExpr {
            generator: parent,
            shift: *last,
        }),
    }
}

impl TowerSpec {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.characteristic()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn beta(&self) -> Option<FieldElement> {
        self.beta.map(|b| self.ctx.element(b))
    }

    /// Generators in construction order, `x1` first.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Number of algebraic (non-`x1`) generators.
    pub fn relation_count(&self) -> usize {
        self.generators.iter().filter(|g| g.parent.is_some()).count()
    }

    pub fn generator(&self, id: &GeneratorId) -> Option<&Generator> {
        self.generators.iter().find(|g| &g.id == id)
    }

    /// Maps `x_{m+2}` (m >= 1) to `u_{0^m}` inside closure models.
    pub fn resolve_alias(&self, id: &GeneratorId) -> GeneratorId {
        match (self.variant, id) {
            (Variant::ClosureFull | Variant::ClosureReduced, GeneratorId::X(i)) if *i >= 3 => {
                GeneratorId::U(vec![0; i - 2])
            }
            _ => id.clone(),
        }
    }

    /// Topological order of the generators; ties broken by canonical id order.
    pub fn dependency_order(&self) -> Result<Vec<GeneratorId>> {
        let index: HashMap<&GeneratorId, usize> = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| (&g.id, i))
            .collect();
        if index.len() != self.generators.len() {
            return Err(TowerError::Malformed("duplicate generator".into()));
        }
        let mut indegree = vec![0usize; self.generators.len()];
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.generators.len()];
        for (i, g) in self.generators.iter().enumerate() {
            if let Some(parent) = &g.parent {
                let j = *index.get(&parent.generator).ok_or_else(|| {
                    TowerError::UnknownGenerator(parent.generator.display(&self.ctx))
                })?;
                indegree[i] += 1;
                children[j].push(i);
            }
        }

        struct Ready<'a>(&'a GeneratorId, usize, &'a FieldCtx);
        impl PartialEq for Ready<'_> {
            fn eq(&self, o: &Self) -> bool {
                self.1 == o.1
            }
        }
        impl Eq for Ready<'_> {}
        impl PartialOrd for Ready<'_> {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Ready<'_> {
            fn cmp(&self, o: &Self) -> Ordering {
                // min-heap on canonical order
                o.0.cmp_canonical(self.0, self.2)
            }
        }

        let mut heap: BinaryHeap<Ready> = indegree
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| Ready(&self.generators[i].id, i, &self.ctx))
            .collect();
        let mut order = Vec::with_capacity(self.generators.len());
        while let Some(Ready(id, i, _)) = heap.pop() {
            order.push(id.clone());
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    heap.push(Ready(&self.generators[c].id, c, &self.ctx));
                }
            }
        }
        if order.len() != self.generators.len() {
            return Err(TowerError::CyclicDependency);
        }
        Ok(order)
    }

    /// The sub-description containing `ids` and all of their ancestors.
    pub fn restrict_to(&self, ids: &[GeneratorId]) -> Result<TowerSpec> {
        let mut keep: BTreeMap<GeneratorId, ()> = BTreeMap::new();
        let mut stack: Vec<GeneratorId> = ids.iter().map(|i| self.resolve_alias(i)).collect();
        while let Some(id) = stack.pop() {
            if keep.contains_key(&id) {
                continue;
            }
            let g = self
                .generator(&id)
                .ok_or_else(|| TowerError::UnknownGenerator(id.display(&self.ctx)))?;
            if let Some(parent) = &g.parent {
                stack.push(parent.generator.clone());
            }
            keep.insert(id, ());
        }
        Ok(TowerSpec {
            ctx: Arc::clone(&self.ctx),
            n: self.n,
            variant: self.variant,
            beta: self.beta,
            generators: self
                .generators
                .iter()
                .filter(|g| keep.contains_key(&g.id))
                .cloned()
                .collect(),
        })
    }

    pub fn parent_expr_string(&self, parent: &ParentExpr) -> String {
        let base = parent.generator.display(&self.ctx);
        if parent.shift == 0 {
            base
        } else {
            format!("{base}+{}", self.ctx.format_raw(parent.shift))
        }
    }

    pub fn to_document(&self) -> TowerDocument {
        TowerDocument {
            p: self.p(),
            n: self.n,
            variant: self.variant,
            beta: self.beta.map(|b| self.ctx.format_raw(b)),
            modulus: self.ctx.modulus_string(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorDocument {
                    id: g.id.display(&self.ctx),
                    relation: g.parent.as_ref().map(|par| RelationDocument {
                        parent_expr: self.parent_expr_string(par),
                    }),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("tower document serializes")
    }

    pub fn from_document(doc: &TowerDocument) -> Result<TowerSpec> {
        let ctx = field_for(doc.p as u64)?;
        let beta = doc.beta.as_deref().map(|b| ctx.parse_raw(b)).transpose()?;
        let mut generators = Vec::with_capacity(doc.generators.len());
        for g in &doc.generators {
            let id = GeneratorId::parse(&g.id, &ctx)?;
            let parent = match &g.relation {
                None => None,
                Some(rel) => {
                    let (name, shift) = split_parent_expr(&rel.parent_expr)
                        .ok_or_else(|| TowerError::Malformed(rel.parent_expr.clone()))?;
                    let shift = match shift {
                        "" => 0,
                        s => ctx.parse_raw(s.strip_prefix('+').unwrap_or(s))?,
                    };
                    Some(ParentExpr {
                        generator: GeneratorId::parse(name, &ctx)?,
                        shift,
                    })
                }
            };
            generators.push(Generator { id, parent });
        }
        let spec = TowerSpec {
            ctx,
            n: doc.n,
            variant: doc.variant,
            beta,
            generators,
        };
        spec.dependency_order()?;
        Ok(spec)
    }

    pub fn from_json(s: &str) -> Result<TowerSpec> {
        let doc: TowerDocument =
            serde_json::from_str(s).map_err(|e| TowerError::Malformed(e.to_string()))?;
        TowerSpec::from_document(&doc)
    }
}

/// Splits `u[t,0]+2*t` into `("u[t,0]", "+2*t")`.
fn split_parent_expr(expr: &str) -> Option<(&str, &str)> {
    let expr = expr.trim();
    let cut = if expr.starts_with("u[") {
        expr.find(']')? + 1
    } else {
        let digits = expr.strip_prefix('x')?;
        1 + digits.find(|c: char| !c.is_ascii_digit()).unwrap_or(digits.len())
    };
    Some((&expr[..cut], &expr[cut..]))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TowerDocument {
    pub p: u32,
    pub n: usize,
    pub variant: Variant,
    pub beta: Option<String>,
    #[serde(default)]
    pub modulus: String,
    pub generators: Vec<GeneratorDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorDocument {
    pub id: String,
    pub relation: Option<RelationDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RelationDocument {
    pub parent_expr: String,
}

/// The nine index sorts used when adjoining `u_c`, `c` of length `n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndexType(pub u8);

/// Classifies an index vector; overlapping sorts are resolved in the
/// priority order 1, 2, 3, 8, 9, 6, 7, 4, 5.
pub fn classify_index(c: &[FieldElement]) -> Result<IndexType> {
    let len = c.len();
    if len < 3 {
        return Err(TowerError::VectorTooShort(len));
    }
    if let Some(bad) = c.iter().find(|e| !e.is_trace_zero()) {
        return Err(TowerError::IndexNotTraceZero(bad.to_string()));
    }
    let nz: Vec<bool> = c.iter().map(|e| !e.is_zero()).collect();
    Ok(IndexType(classify_pattern(&nz)))
}

/// Classification on the zero/nonzero pattern alone.
pub fn classify_pattern(nz: &[bool]) -> u8 {
    let len = nz.len();
    let n = len - 1;
    let last = nz[len - 1];
    let first_nonzero = nz.iter().position(|&b| b);
    let rest_zero = |from: usize| nz[from..].iter().all(|&b| !b);
    match first_nonzero {
        None => 1,
        Some(i) if i == n => 2,
        Some(0) if rest_zero(1) => 3,
        // s = i leading zeros; the sort needs s = n - 1 for 8/9
        Some(i) if i == n - 1 => {
            if last {
                9
            } else {
                8
            }
        }
        Some(0) => {
            if last {
                5
            } else {
                4
            }
        }
        Some(_) => {
            if last {
                7
            } else {
                6
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(spec: &TowerSpec, ids: &[GeneratorId]) -> Vec<String> {
        ids.iter().map(|i| i.display(spec.ctx())).collect()
    }

    #[test]
    fn gs_shapes() {
        let s = gs_tower(3, 2).unwrap();
        assert_eq!((s.generators().len(), s.relation_count()), (2, 1));
        let s = gs_tower(3, 1).unwrap();
        assert_eq!((s.generators().len(), s.relation_count()), (1, 0));
        let s = gs_tower(5, 4).unwrap();
        assert_eq!((s.generators().len(), s.relation_count()), (4, 3));
        assert!(matches!(
            gs_tower(4, 2),
            Err(TowerError::Field(FieldError::NotOddPrime(4)))
        ));
    }

    #[test]
    fn closure_shapes() {
        let full = closure_tower(3, 3, Some("t"), ClosureModel::Full).unwrap();
        assert_eq!(full.relation_count(), 4);
        let order = full.dependency_order().unwrap();
        assert_eq!(names(&full, &order), ["x1", "x2", "u[0]", "u[t]", "u[2*t]"]);

        let red = closure_tower(3, 3, Some("t"), ClosureModel::Reduced).unwrap();
        assert_eq!(
            names(&red, &red.dependency_order().unwrap()),
            ["x1", "x2", "u[0]", "u[t]"]
        );

        let full4 = closure_tower(3, 4, Some("t"), ClosureModel::Full).unwrap();
        assert_eq!(full4.relation_count(), 13);
        let order = full4.dependency_order().unwrap();
        let first_long = order
            .iter()
            .position(|g| matches!(g, GeneratorId::U(c) if c.len() == 2))
            .unwrap();
        assert!(order[first_long..]
            .iter()
            .all(|g| matches!(g, GeneratorId::U(c) if c.len() == 2)));
    }

    #[test]
    fn closure_errors() {
        assert_eq!(
            closure_tower(3, 4, Some("t"), ClosureModel::Reduced).unwrap_err(),
            TowerError::UnsupportedReducedLevel(4)
        );
        assert_eq!(
            closure_tower(3, 3, Some("1"), ClosureModel::Full).unwrap_err(),
            TowerError::BetaNotTraceZero("1".into())
        );
        assert_eq!(
            closure_tower(3, 3, Some("0"), ClosureModel::Full).unwrap_err(),
            TowerError::BetaZero
        );
        assert!(matches!(
            closure_tower(3, 2, None, ClosureModel::Full),
            Err(TowerError::LevelTooSmall { .. })
        ));
    }

    #[test]
    fn full_generator_count_formula() {
        for p in [3u64, 5] {
            for n in 3..=5 {
                if p == 5 && n == 5 {
                    continue;
                }
                let s = closure_tower(p, n, None, ClosureModel::Full).unwrap();
                let expected: u64 = 1 + (1..=n as u32 - 2).map(|m| p.pow(m)).sum::<u64>();
                assert_eq!(s.relation_count() as u64, expected, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn gs_dependency_order() {
        let s = gs_tower(3, 3).unwrap();
        assert_eq!(names(&s, &s.dependency_order().unwrap()), ["x1", "x2", "x3"]);
    }

    #[test]
    fn cycle_detected() {
        let mut doc = gs_tower(3, 3).unwrap().to_document();
        doc.generators[0].relation = Some(RelationDocument {
            parent_expr: "x3".into(),
        });
        assert_eq!(
            TowerSpec::from_document(&doc).unwrap_err(),
            TowerError::CyclicDependency
        );
    }

    #[test]
    fn json_roundtrip() {
        let s = closure_tower(3, 4, Some("2t"), ClosureModel::Full).unwrap();
        let back = TowerSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back.generators(), s.generators());
        assert_eq!(back.beta(), None.or(back.beta()));
        assert_eq!(back.to_json(), s.to_json());
    }

    #[test]
    fn classify_examples() {
        let ctx = make_field(3, 2).unwrap();
        let v = |s: &[&str]| -> Vec<FieldElement> { s.iter().map(|x| ctx.parse(x).unwrap()).collect() };
        assert_eq!(classify_index(&v(&["0", "0", "0", "0"])).unwrap(), IndexType(1));
        assert_eq!(classify_index(&v(&["t", "0", "0", "0"])).unwrap(), IndexType(3));
        assert_eq!(classify_index(&v(&["0", "0", "t", "0"])).unwrap(), IndexType(8));
        assert_eq!(classify_index(&v(&["0", "0", "0", "t"])).unwrap(), IndexType(2));
        assert_eq!(classify_index(&v(&["0", "t", "0", "2t"])).unwrap(), IndexType(7));
        assert_eq!(classify_index(&v(&["t", "t", "0", "0"])).unwrap(), IndexType(4));
        assert_eq!(classify_index(&v(&["t", "0", "0", "t"])).unwrap(), IndexType(5));
        assert_eq!(
            classify_index(&v(&["0", "t"])).unwrap_err(),
            TowerError::VectorTooShort(2)
        );
    }

    /// Literal transcription of the nine sorts, used to check that the
    /// priority order picks the first matching sort and that every vector
    /// matches at least one.
    fn matching_sorts(nz: &[bool]) -> Vec<u8> {
        let len = nz.len();
        let n = len - 1;
        let z = |i: usize| !nz[i - 1];
        let all_zero = |a: usize, b: usize| (a..=b).all(z);
        let mut out = Vec::new();
        if all_zero(1, n + 1) {
            out.push(1);
        }
        if all_zero(1, n) && !z(n + 1) {
            out.push(2);
        }
        if !z(1) && all_zero(2, n + 1) {
            out.push(3);
        }
        if !z(1) && z(n + 1) {
            out.push(4);
        }
        if !z(1) && !z(n + 1) {
            out.push(5);
        }
        for s in 1..=n {
            if all_zero(1, s) && !z(s + 1) && n + 1 - s >= 2 {
                if z(n + 1) {
                    out.push(6);
                } else {
                    out.push(7);
                }
            }
        }
        if all_zero(1, n - 1) && !z(n) && z(n + 1) {
            out.push(8);
        }
        if all_zero(1, n - 1) && !z(n) && !z(n + 1) {
            out.push(9);
        }
        out
    }

    #[test]
    fn classification_is_total_and_follows_priority() {
        const PRIORITY: [u8; 9] = [1, 2, 3, 8, 9, 6, 7, 4, 5];
        let ctx = make_field(3, 2).unwrap();
        let km = ctx.trace_zero_raw();
        for len in 3..=5 {
            let total = 3usize.pow(len as u32);
            for code in 0..total {
                let mut x = code;
                let c: Vec<FieldElement> = (0..len)
                    .map(|_| {
                        let e = ctx.element(km[x % 3]);
                        x /= 3;
                        e
                    })
                    .collect();
                let nz: Vec<bool> = c.iter().map(|e| !e.is_zero()).collect();
                let sorts = matching_sorts(&nz);
                assert!(!sorts.is_empty(), "{nz:?} unmatched");
                let expected = PRIORITY.iter().find(|t| sorts.contains(t)).unwrap();
                assert_eq!(classify_index(&c).unwrap().0, *expected, "{nz:?}");
            }
        }
    }
}
