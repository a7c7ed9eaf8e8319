use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gstower::identities::lemma_instance;
use gstower::{closure_tower, count_split_points, gs_tower, make_field, ClosureModel, Expr, RelationSystem};

fn field_ops(c: &mut Criterion) {
    for p in [3u64, 5, 7] {
        let f = make_field(p, 2).unwrap();
        let elems = f.raw_elements();
        c.bench_function(&format!("field/mul-all-pairs/p{p}"), |b| {
            b.iter(|| {
                let mut acc = 0u32;
                for &x in &elems {
                    for &y in &elems {
                        acc = f.add_raw(acc, f.mul_raw(x, y));
                    }
                }
                black_box(acc)
            })
        });
        c.bench_function(&format!("field/inv-all/p{p}"), |b| {
            b.iter(|| elems.iter().filter_map(|&x| f.inv_raw(x)).fold(0, |a, y| a ^ y))
        });
    }
}

fn census(c: &mut Criterion) {
    let gs = gs_tower(3, 6).unwrap();
    c.bench_function("census/gs/p3/n6", |b| b.iter(|| count_split_points(black_box(&gs), false).unwrap()));
    let reduced = closure_tower(3, 3, None, ClosureModel::Reduced).unwrap();
    c.bench_function("census/closure-reduced/p3/n3", |b| {
        b.iter(|| count_split_points(black_box(&reduced), false).unwrap())
    });
}

fn normalize(c: &mut Criterion) {
    let spec = gs_tower(3, 4).unwrap();
    let rs = RelationSystem::build(&spec).unwrap();
    let e = (Expr::x(4) + Expr::x(3) * Expr::x(2)).pow(7) - Expr::x(2).wp();
    c.bench_function("kernel/normalize/gs-p3-n4", |b| b.iter(|| e.to_symbolic(black_box(&rs)).unwrap()));
}

fn lemma(c: &mut Criterion) {
    let f = make_field(3, 2).unwrap();
    let alpha = *f.trace_zero_raw().iter().find(|&&a| a != 0).unwrap();
    c.bench_function("identities/lemma-instance/p3/q-empty", |b| {
        b.iter(|| lemma_instance(&f, &[], alpha, 1).unwrap())
    });
    c.bench_function("identities/lemma-instance/p3/q-len1", |b| {
        b.iter(|| lemma_instance(&f, &[alpha], alpha, 1).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = field_ops, census, normalize, lemma
}
criterion_main!(benches);
