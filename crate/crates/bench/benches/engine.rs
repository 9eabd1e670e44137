use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use markoff_bench::{coefficient_pairs, context, solutions, PRIMES};
use markoff_core::counting::{count_ph, count_split_curve};
use markoff_core::cyclo::no_finite_orbit_sweep;
use markoff_core::ff::{subgroup, Ambient};
use markoff_core::incidence::{IncidenceGraph, VertexSet};
use markoff_core::orbits::{components, components_bfs};
use markoff_core::stepanov::{build_aux_poly, select_params, RationalFunctionSpec};
use markoff_core::SolutionSet;

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    for p in PRIMES {
        g.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| SolutionSet::enumerate(black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn orbit_partition(c: &mut Criterion) {
    let mut g = c.benchmark_group("components");
    for p in PRIMES {
        let s = solutions(p);
        g.bench_with_input(BenchmarkId::new("union_find", p), &s, |b, s| b.iter(|| components(s)));
        g.bench_with_input(BenchmarkId::new("bfs", p), &s, |b, s| b.iter(|| components_bfs(s)));
    }
    g.finish();
}

fn incidence(c: &mut Criterion) {
    let mut g = c.benchmark_group("incidence");
    g.sample_size(10);
    for p in PRIMES {
        let ctx = context(p);
        g.bench_with_input(BenchmarkId::new("build", p), &ctx, |b, ctx| {
            b.iter(|| IncidenceGraph::build(ctx, VertexSet::Full))
        });
        let graph = IncidenceGraph::build(&ctx, VertexSet::Full);
        g.bench_with_input(BenchmarkId::new("diameter", p), &graph, |b, graph| b.iter(|| graph.diameter()));
    }
    g.finish();
}

fn counting(c: &mut Criterion) {
    let mut g = c.benchmark_group("counting");
    for p in PRIMES {
        let ctx = context(p);
        let (a, bb) = coefficient_pairs(&ctx, 1, p)[0];
        let h = subgroup(Ambient::Split, (p - 1) / 2, &ctx).unwrap();
        g.bench_with_input(BenchmarkId::new("ph", p), &ctx, |b, ctx| b.iter(|| count_ph(a, bb, &h, ctx).unwrap()));
        g.bench_with_input(BenchmarkId::new("split_curve", p), &ctx, |b, ctx| {
            b.iter(|| count_split_curve(a, bb, 2, 2, ctx).unwrap())
        });
    }
    g.finish();
}

fn aux_poly(c: &mut Criterion) {
    let mut g = c.benchmark_group("aux_poly");
    g.sample_size(10);
    for (p, t) in [(397, 36), (461, 46)] {
        let ctx = context(p);
        let spec = RationalFunctionSpec::unit_line(p);
        let params = select_params(spec.e() as u64, t, t, p).expect("admissible parameters");
        g.bench_with_input(BenchmarkId::from_parameter(p), &ctx, |b, ctx| {
            b.iter(|| build_aux_poly(&spec, &params, ctx).unwrap())
        });
    }
    g.finish();
}

fn eta_sweep(c: &mut Criterion) {
    c.bench_function("eta_sweep_12", |b| b.iter(|| no_finite_orbit_sweep(black_box(12)).unwrap()));
}

criterion_group!(benches, enumeration, orbit_partition, incidence, counting, aux_poly, eta_sweep);
criterion_main!(benches);
