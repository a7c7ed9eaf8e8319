//! Rational points of the affine tower models over `F_{p^2}`.
//!
//! Points are found by walking the dependency order: the value of each
//! generator is a root of `Y^p + Y = g(parent + shift)` at the values already
//! chosen. A branch dies when `g` has a pole or the equation has no root.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldCtx, FieldElement, FieldError};
use crate::tower::{GeneratorId, TowerError, TowerSpec, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("no completely split fiber exists for this model")]
    NoSplitFiber,
    #[error("split-value checks apply to closure models only")]
    NotClosure,
}

pub type Result<T> = std::result::Result<T, PointError>;

/// All `y` in `F_{p^2}` with `y^p + y = g(x)`.
pub fn next_coordinate(x: &FieldElement) -> Result<Vec<FieldElement>> {
    let ctx = x.ctx();
    let w = crate::field::eval_wgh(x, crate::field::Wgh::G)?;
    Ok(ctx.artin_schreier_solve(&w)?)
}

/// Flattened dependency order: slot 0 is `x1`, every later slot names the
/// slot of its parent and the shift added to it.
#[derive(Debug, Clone)]
pub struct Plan {
    ctx: Arc<FieldCtx>,
    ids: Vec<GeneratorId>,
    parent: Vec<usize>,
    shift: Vec<u32>,
}

impl Plan {
    pub fn new(spec: &TowerSpec) -> Result<Plan> {
        let ids = spec.dependency_order()?;
        let mut parent = vec![0];
        let mut shift = vec![0];
        for id in &ids[1..] {
            let g = spec.generator(id).expect("ordered ids come from the spec");
            let par = g
                .parent
                .as_ref()
                .ok_or_else(|| TowerError::Malformed("second transcendental generator".into()))?;
            let slot = ids
                .iter()
                .position(|i| *i == par.generator)
                .ok_or_else(|| TowerError::UnknownGenerator(par.generator.display(spec.ctx())))?;
            parent.push(slot);
            shift.push(par.shift);
        }
        Ok(Plan {
            ctx: Arc::clone(spec.ctx()),
            ids,
            parent,
            shift,
        })
    }

    pub fn ids(&self) -> &[GeneratorId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Right-hand side `g(parent + shift)` for slot `i`, `None` at a pole.
    fn rhs(&self, values: &[u32], i: usize) -> Option<u32> {
        let f = &*self.ctx;
        let v = f.add_raw(values[self.parent[i]], self.shift[i]);
        let den = f.wp_raw(v);
        let inv = f.inv_raw(den)?;
        Some(f.mul_raw(f.pow_raw(v, f.characteristic() as u64 + 1), inv))
    }
}

/// One affine point: generator values in dependency order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointRecord {
    pub assignment: Vec<(String, FieldElement)>,
    #[serde(skip)]
    ids: Vec<GeneratorId>,
}

impl PointRecord {
    pub fn get(&self, id: &GeneratorId) -> Option<&FieldElement> {
        self.ids
            .iter()
            .position(|i| i == id)
            .map(|k| &self.assignment[k].1)
    }

    pub fn raw_values(&self) -> Vec<u32> {
        self.assignment.iter().map(|(_, v)| v.raw()).collect()
    }

    pub fn ids(&self) -> &[GeneratorId] {
        &self.ids
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberReport {
    pub base: FieldElement,
    pub points: Vec<PointRecord>,
    pub split: bool,
    pub all_values_outside_kminus: bool,
}

/// Fiber statistics without the points themselves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberSummary {
    pub base: String,
    #[serde(skip)]
    pub base_raw: u32,
    pub fiber_size: u64,
    pub split: bool,
    pub values_outside_kminus: bool,
}

struct Walk<'a> {
    plan: &'a Plan,
    values: Vec<u32>,
    split: bool,
    outside: bool,
    leaves: u64,
}

impl Walk<'_> {
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[u32])) {
        if depth == self.plan.len() {
            self.leaves += 1;
            visit(&self.values);
            return;
        }
        let f = &*self.plan.ctx;
        let Some(w) = self.plan.rhs(&self.values, depth) else {
            self.split = false;
            return;
        };
        let roots = f.wp_preimages_raw(w);
        if roots.len() != f.characteristic() as usize {
            self.split = false;
        }
        for &y in roots {
            if f.wp_raw(y) == 0 {
                self.outside = false;
            }
            self.values[depth] = y;
            self.run(depth + 1, visit);
        }
    }
}

fn walk_fiber(plan: &Plan, base: u32, visit: &mut dyn FnMut(&[u32])) -> (u64, bool, bool) {
    let mut values = vec![0u32; plan.len()];
    values[0] = base;
    let mut w = Walk {
        plan,
        values,
        split: true,
        outside: plan.ctx.wp_raw(base) != 0,
        leaves: 0,
    };
    w.run(1, visit);
    let split = w.split && w.leaves > 0;
    (w.leaves, split, w.outside && w.leaves > 0)
}

/// Enumerates every affine point over `x1 = base`.
pub fn enumerate_fiber(spec: &TowerSpec, base: &FieldElement) -> Result<FiberReport> {
    let plan = Plan::new(spec)?;
    let ctx = spec.ctx();
    let names: Vec<String> = plan.ids.iter().map(|i| i.display(ctx)).collect();
    let mut points = Vec::new();
    let (_, split, outside) = walk_fiber(&plan, base.raw(), &mut |vals| {
        points.push(PointRecord {
            assignment: names
                .iter()
                .cloned()
                .zip(vals.iter().map(|&v| ctx.element(v)))
                .collect(),
            ids: plan.ids.clone(),
        });
    });
    Ok(FiberReport {
        base: base.clone(),
        points,
        split,
        all_values_outside_kminus: outside,
    })
}

pub fn fiber_summary(plan: &Plan, base: u32) -> FiberSummary {
    let (size, split, outside) = walk_fiber(plan, base, &mut |_| {});
    FiberSummary {
        base: plan.ctx.format_raw(base),
        base_raw: base,
        fiber_size: size,
        split,
        values_outside_kminus: outside,
    }
}

/// Bases of the split locus, `F_{p^2}` minus the trace-zero set, canonical order.
pub fn split_bases(ctx: &FieldCtx) -> Vec<u32> {
    ctx.raw_elements()
        .into_iter()
        .filter(|&x| ctx.wp_raw(x) != 0)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelDegree {
    Exact(u64),
    UpperBound(u64),
}

impl ModelDegree {
    pub fn value(self) -> u64 {
        match self {
            ModelDegree::Exact(d) | ModelDegree::UpperBound(d) => d,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, ModelDegree::Exact(_))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub rows: Vec<FiberSummary>,
    pub total: u64,
    pub degree: ModelDegree,
    /// `(p^2 - p) * degree`.
    pub bound: u64,
    pub bound_met: bool,
}

impl Census {
    pub const CSV_HEADER: &'static str = "base,fiber_size,split,values_outside_Kminus";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                r.base, r.fiber_size, r.split, r.values_outside_kminus
            )
            .unwrap();
        }
        out
    }
}

fn degree_from_rows(spec: &TowerSpec, rows: &[FiberSummary]) -> Result<ModelDegree> {
    let d = rows
        .iter()
        .find(|r| r.split)
        .map(|r| r.fiber_size)
        .ok_or(PointError::NoSplitFiber)?;
    Ok(match spec.variant() {
        Variant::Gs | Variant::ClosureReduced => ModelDegree::Exact(d),
        Variant::ClosureFull => ModelDegree::UpperBound(d),
    })
}

/// Sums fiber sizes over the split locus; fibers run in parallel on request
/// and are merged in canonical base order.
pub fn count_split_points(spec: &TowerSpec, parallel: bool) -> Result<Census> {
    let plan = Plan::new(spec)?;
    let bases = split_bases(spec.ctx());
    let rows: Vec<FiberSummary> = if parallel {
        bases.par_iter().map(|&b| fiber_summary(&plan, b)).collect()
    } else {
        bases.iter().map(|&b| fiber_summary(&plan, b)).collect()
    };
    let total = rows.iter().map(|r| r.fiber_size).sum();
    let degree = degree_from_rows(spec, &rows)?;
    let p = spec.p() as u64;
    let bound = (p * p - p) * degree.value();
    Ok(Census {
        rows,
        total,
        degree,
        bound,
        bound_met: total >= bound,
    })
}

/// Degree of the model read off a completely split fiber. Exact for the
/// irreducible models, an upper bound for the full closure model whose
/// affine system may be reducible.
pub fn degree_via_fiber(spec: &TowerSpec) -> Result<ModelDegree> {
    let plan = Plan::new(spec)?;
    let ctx = spec.ctx();
    for b in split_bases(ctx) {
        let s = fiber_summary(&plan, b);
        if s.split {
            return degree_from_rows(spec, &[s]);
        }
    }
    Err(PointError::NoSplitFiber)
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitValuesReport {
    /// Complete points covered by the walk.
    pub points_checked: u64,
    /// Individual `(u_c, alpha)` splitting checks performed.
    pub polynomial_checks: u64,
    pub passed: bool,
    pub counterexample: Option<String>,
}

/// Checks at every enumerated split point that each generator value lies
/// outside the trace-zero set and that `X^p + X - g(u_c + alpha)` has `p`
/// roots in `F_{p^2}` for every trace-zero `alpha`.
pub fn verify_split_values(spec: &TowerSpec) -> Result<SplitValuesReport> {
    if spec.variant() == Variant::Gs {
        return Err(PointError::NotClosure);
    }
    let plan = Plan::new(spec)?;
    let ctx = Arc::clone(spec.ctx());
    let kminus = ctx.trace_zero_raw();
    let p = ctx.characteristic() as usize;
    let reports: Vec<(u64, u64, Option<String>)> = split_bases(&ctx)
        .par_iter()
        .map(|&base| {
            let mut checker = SplitChecker {
                plan: &plan,
                ctx: &ctx,
                kminus: &kminus,
                p,
                values: vec![0; plan.len()],
                points: 0,
                checks: 0,
                failure: None,
            };
            checker.values[0] = base;
            checker.run(1);
            (checker.points, checker.checks, checker.failure)
        })
        .collect();
    let mut out = SplitValuesReport {
        points_checked: 0,
        polynomial_checks: 0,
        passed: true,
        counterexample: None,
    };
    for (pts, checks, fail) in reports {
        out.points_checked += pts;
        out.polynomial_checks += checks;
        if out.counterexample.is_none() {
            if let Some(f) = fail {
                out.passed = false;
                out.counterexample = Some(f);
            }
        }
    }
    Ok(out)
}

struct SplitChecker<'a> {
    plan: &'a Plan,
    ctx: &'a FieldCtx,
    kminus: &'a [u32],
    p: usize,
    values: Vec<u32>,
    points: u64,
    checks: u64,
    failure: Option<String>,
}

impl SplitChecker<'_> {
    fn fail(&mut self, depth: usize, why: &str) {
        if self.failure.is_none() {
            let vals: Vec<String> = (0..depth)
                .map(|i| {
                    format!(
                        "{}={}",
                        self.plan.ids[i].display(self.ctx),
                        self.ctx.format_raw(self.values[i])
                    )
                })
                .collect();
            self.failure = Some(format!("{why} at {}", vals.join(", ")));
        }
    }

    fn run(&mut self, depth: usize) {
        if self.failure.is_some() {
            return;
        }
        if depth == self.plan.len() {
            self.points += 1;
            return;
        }
        let f = self.ctx;
        let Some(w) = self.plan.rhs(&self.values, depth) else {
            self.fail(depth, "pole of g");
            return;
        };
        let roots = f.wp_preimages_raw(w);
        if roots.len() != self.p {
            self.fail(depth, "relation does not split");
            return;
        }
        for &y in roots {
            self.values[depth] = y;
            if matches!(self.plan.ids[depth], GeneratorId::U(_) | GeneratorId::X(_)) && f.wp_raw(y) == 0 {
                self.fail(depth + 1, "value in the trace-zero set");
                return;
            }
            if matches!(self.plan.ids[depth], GeneratorId::U(_)) {
                for &a in self.kminus {
                    self.checks += 1;
                    let v = f.add_raw(y, a);
                    let Some(inv) = f.inv_raw(f.wp_raw(v)) else {
                        self.fail(depth + 1, "pole of g(u_c + alpha)");
                        return;
                    };
                    let gv = f.mul_raw(f.pow_raw(v, self.p as u64 + 1), inv);
                    if f.wp_preimages_raw(gv).len() != self.p {
                        self.fail(depth + 1, "f_{c,alpha} does not split");
                        return;
                    }
                }
            }
            self.run(depth + 1);
        }
    }
}

/// A uniformly random root at each step over a random split base. Returns
/// `None` if the walk dies, which cannot happen on split models.
pub fn random_split_point(spec: &TowerSpec, rng: &mut impl Rng) -> Result<Option<PointRecord>> {
    let plan = Plan::new(spec)?;
    Ok(random_point_in(&plan, rng))
}

pub fn random_point_in(plan: &Plan, rng: &mut impl Rng) -> Option<PointRecord> {
    let ctx = &plan.ctx;
    let bases = split_bases(ctx);
    let mut values = vec![0u32; plan.len()];
    values[0] = bases[rng.gen_range(0..bases.len())];
    for i in 1..plan.len() {
        let w = plan.rhs(&values, i)?;
        let roots = ctx.wp_preimages_raw(w);
        if roots.is_empty() {
            return None;
        }
        values[i] = roots[rng.gen_range(0..roots.len())];
    }
    Some(PointRecord {
        assignment: plan
            .ids
            .iter()
            .zip(&values)
            .map(|(id, &v)| (id.display(ctx), ctx.element(v)))
            .collect(),
        ids: plan.ids.clone(),
    })
}

/// Every point of the model over the split locus, canonical order.
pub fn all_split_points(spec: &TowerSpec) -> Result<Vec<PointRecord>> {
    let ctx = spec.ctx();
    let mut out = Vec::new();
    for b in split_bases(ctx) {
        out.extend(enumerate_fiber(spec, &ctx.element(b))?.points);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, trace_norm};
    use crate::tower::{closure_tower, gs_tower, ClosureModel};

    fn strs(v: &[FieldElement]) -> Vec<String> {
        v.iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn next_coordinate_examples() {
        let f = make_field(3, 2).unwrap();
        assert_eq!(strs(&next_coordinate(&f.one()).unwrap()), ["1", "1+t", "1+2*t"]);
        assert_eq!(
            next_coordinate(&f.t()).unwrap_err(),
            PointError::Field(FieldError::PoleAtInput("x^p + x"))
        );
        assert_eq!(
            strs(&next_coordinate(&f.parse("1+t").unwrap()).unwrap()),
            ["2", "2+t", "2+2*t"]
        );
    }

    #[test]
    fn fiber_examples() {
        let gs = gs_tower(3, 2).unwrap();
        let f = gs.ctx().clone();
        let r = enumerate_fiber(&gs, &f.one()).unwrap();
        assert_eq!((r.points.len(), r.split), (3, true));
        let r = enumerate_fiber(&gs, &f.t()).unwrap();
        assert_eq!((r.points.len(), r.split), (0, false));

        let red = closure_tower(3, 3, Some("t"), ClosureModel::Reduced).unwrap();
        let r = enumerate_fiber(&red, &red.ctx().one()).unwrap();
        assert_eq!(r.points.len(), 27);
        assert!(r.split && r.all_values_outside_kminus);
    }

    #[test]
    fn census_examples() {
        let c = count_split_points(&gs_tower(3, 2).unwrap(), false).unwrap();
        assert_eq!(c.total, 18);
        let c = count_split_points(&gs_tower(3, 3).unwrap(), false).unwrap();
        assert_eq!(c.total, 54);
        let red = closure_tower(3, 3, Some("t"), ClosureModel::Reduced).unwrap();
        let c = count_split_points(&red, true).unwrap();
        assert_eq!((c.total, c.degree, c.bound, c.bound_met), (162, ModelDegree::Exact(27), 162, true));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degree_via_fiber(&gs_tower(3, 4).unwrap()).unwrap(), ModelDegree::Exact(27));
        let red = closure_tower(3, 3, Some("t"), ClosureModel::Reduced).unwrap();
        assert_eq!(degree_via_fiber(&red).unwrap(), ModelDegree::Exact(27));
        let full = closure_tower(3, 3, Some("t"), ClosureModel::Full).unwrap();
        assert_eq!(degree_via_fiber(&full).unwrap(), ModelDegree::UpperBound(81));
        assert_eq!(degree_via_fiber(&gs_tower(3, 1).unwrap()).unwrap(), ModelDegree::Exact(1));
    }

    #[test]
    fn gs_fibers_are_uniform() {
        for (p, nmax) in [(3u64, 4usize), (5, 3)] {
            for n in 1..=nmax {
                let spec = gs_tower(p, n).unwrap();
                let plan = Plan::new(&spec).unwrap();
                let ctx = spec.ctx();
                for x in ctx.raw_elements() {
                    let s = fiber_summary(&plan, x);
                    let expected = if ctx.wp_raw(x) == 0 && n > 1 { 0 } else { p.pow(n as u32 - 1) };
                    assert_eq!(s.fiber_size, expected, "p={p} n={n} base={}", s.base);
                }
            }
        }
    }

    #[test]
    fn x2_trace_is_norm_over_trace() {
        let spec = gs_tower(5, 2).unwrap();
        for pt in all_split_points(&spec).unwrap() {
            let x1 = pt.get(&GeneratorId::X(1)).unwrap();
            let x2 = pt.get(&GeneratorId::X(2)).unwrap();
            let (tr, nm) = trace_norm(x1).unwrap();
            let (tr2, _) = trace_norm(x2).unwrap();
            assert_eq!(tr2, nm.div(&tr).unwrap());
            assert!(!tr2.is_zero());
        }
    }

    #[test]
    fn split_values_small() {
        let full = closure_tower(3, 3, Some("t"), ClosureModel::Full).unwrap();
        let r = verify_split_values(&full).unwrap();
        assert!(r.passed, "{:?}", r.counterexample);
        assert_eq!(r.points_checked, 6 * 81);
        assert_eq!(
            verify_split_values(&gs_tower(3, 3).unwrap()).unwrap_err(),
            PointError::NotClosure
        );
    }

    #[test]
    fn fiber_order_is_canonical() {
        let spec = gs_tower(3, 3).unwrap();
        let r = enumerate_fiber(&spec, &spec.ctx().one()).unwrap();
        let keys: Vec<Vec<FieldElement>> = r
            .points
            .iter()
            .map(|p| p.assignment.iter().map(|(_, v)| v.clone()).collect())
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
