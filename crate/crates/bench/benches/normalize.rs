use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lkt_bench::{family_inputs, tree_inputs};
use lkt_core::{eliminate_inductions, gentzen_eliminate, normalize_with, Budget, Family, Policy, RecursiveDefinitions};

fn policies(c: &mut Criterion) {
    let mut group = c.benchmark_group("linear_cut");
    for (n, g) in family_inputs(Family::LinearCut, &[2, 4, 6, 8]) {
        for policy in [Policy::Full, Policy::UntilAtomic, Policy::UntilQuantifierFree] {
            group.bench_with_input(BenchmarkId::new(policy.name(), n), &g.proof, |b, p| {
                b.iter(|| normalize_with(p, policy, &mut Budget::unlimited()).unwrap())
            });
        }
    }
    for (n, t) in tree_inputs(Family::LinearCut, &[2, 4]) {
        group.bench_with_input(BenchmarkId::new("tree", n), &t, |b, t| {
            b.iter(|| gentzen_eliminate(t, &mut Budget::unlimited()).unwrap())
        });
    }
    group.finish();
}

fn square(c: &mut Criterion) {
    let mut group = c.benchmark_group("square_cut");
    for (n, g) in family_inputs(Family::SquareCut, &[2, 4, 6]) {
        group.bench_with_input(BenchmarkId::new("full", n), &g.proof, |b, p| {
            b.iter(|| normalize_with(p, Policy::Full, &mut Budget::unlimited()).unwrap())
        });
    }
    group.finish();
}

fn acnf(c: &mut Criterion) {
    let g = Family::LinearAcnf.generate(100);
    c.bench_function("linear_acnf/until-atomic/100", |b| {
        b.iter(|| normalize_with(&g.proof, Policy::UntilAtomic, &mut Budget::unlimited()).unwrap())
    });
}

fn induction(c: &mut Criterion) {
    let mut group = c.benchmark_group("ind_linear");
    let defs = RecursiveDefinitions::new();
    for (n, g) in family_inputs(Family::IndLinear, &[4, 16, 64]) {
        group.bench_with_input(BenchmarkId::new("ind-elim", n), &g.proof, |b, p| {
            b.iter(|| eliminate_inductions(p, &defs, &mut Budget::unlimited()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, policies, square, acnf, induction);
criterion_main!(benches);
