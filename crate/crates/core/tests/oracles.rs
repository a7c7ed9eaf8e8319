//! Brute-force point oracles over F_9, with arithmetic written out by hand
//! on coefficient pairs modulo T^2 + 1.

use std::collections::BTreeSet;

use gstower::points::all_split_points;
use gstower::{closure_tower, gs_tower, ClosureModel, GeneratorId, TowerSpec};

type Pair = (u32, u32);

fn pair(raw: u32) -> Pair {
    (raw % 3, raw / 3)
}

fn add(a: Pair, b: Pair) -> Pair {
    ((a.0 + b.0) % 3, (a.1 + b.1) % 3)
}

fn mul(a: Pair, b: Pair) -> Pair {
    // T^2 = -1
    let re = (a.0 * b.0 + 2 * a.1 * b.1) % 3;
    let im = (a.0 * b.1 + a.1 * b.0) % 3;
    (re, im)
}

fn pow(a: Pair, e: u32) -> Pair {
    (0..e).fold((1, 0), |acc, _| mul(acc, a))
}

fn wp(a: Pair) -> Pair {
    add(pow(a, 3), a)
}

fn inv(a: Pair) -> Option<Pair> {
    (0..9).map(pair).find(|&b| mul(a, b) == (1, 0))
}

/// `y^4 / (y^3 + y)`, or `None` at a pole.
fn g(y: Pair) -> Option<Pair> {
    Some(mul(pow(y, 4), inv(wp(y))?))
}

/// Every tuple over F_9 with `wp(x1) != 0` satisfying all relations.
fn brute_force(spec: &TowerSpec) -> BTreeSet<Vec<u32>> {
    let gens = spec.generators();
    let index = |id: &GeneratorId| {
        let id = spec.resolve_alias(id);
        gens.iter().position(|g| g.id == id).expect("parent is a generator")
    };
    let k = gens.len() as u32;
    let mut out = BTreeSet::new();
    'tuples: for code in 0..9u32.pow(k) {
        let vals: Vec<u32> = (0..k).map(|i| code / 9u32.pow(i) % 9).collect();
        for (i, gen) in gens.iter().enumerate() {
            match &gen.parent {
                None => {
                    if wp(pair(vals[i])) == (0, 0) {
                        continue 'tuples;
                    }
                }
                Some(par) => {
                    let z = add(pair(vals[index(&par.generator)]), pair(par.shift));
                    match g(z) {
                        Some(rhs) if wp(pair(vals[i])) == rhs => {}
                        _ => continue 'tuples,
                    }
                }
            }
        }
        out.insert(vals);
    }
    out
}

fn dfs(spec: &TowerSpec) -> BTreeSet<Vec<u32>> {
    all_split_points(spec)
        .unwrap()
        .into_iter()
        .map(|pt| {
            spec.generators()
                .iter()
                .map(|g| pt.get(&g.id).unwrap().raw())
                .collect()
        })
        .collect()
}

fn assert_same(spec: TowerSpec, expected_len: usize) {
    assert_eq!(spec.ctx().modulus_string(), "T^2+1");
    for raw in 0..9 {
        assert_eq!(spec.ctx().digits(raw), vec![raw % 3, raw / 3]);
    }
    let oracle = brute_force(&spec);
    assert_eq!(oracle.len(), expected_len);
    assert_eq!(dfs(&spec), oracle);
}

#[test]
fn gs_level_two_matches_brute_force() {
    assert_same(gs_tower(3, 2).unwrap(), 18);
}

#[test]
fn gs_level_three_matches_brute_force() {
    assert_same(gs_tower(3, 3).unwrap(), 54);
}

#[test]
fn reduced_closure_level_three_matches_brute_force() {
    assert_same(closure_tower(3, 3, None, ClosureModel::Reduced).unwrap(), 162);
}
