use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tradetrust::parallel::Execution;
use tradetrust::sim::{compare_ensemble, run_ensemble, Scenario, Variant};

fn scenario(name: &str) -> Scenario {
    let path = format!("{}/../../scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"));
    Scenario::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn seed_ensemble(c: &mut Criterion) {
    let s = scenario("onboarding");
    let seeds: Vec<u64> = (0..16).collect();
    let mut group = c.benchmark_group("run_ensemble");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| run_ensemble(&s, &seeds, exec).unwrap())
        });
    }
    group.finish();
}

fn variant_comparison(c: &mut Criterion) {
    let s = scenario("attacks");
    let seeds: Vec<u64> = (0..8).collect();
    let mut group = c.benchmark_group("compare_ensemble");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| compare_ensemble(&s, &Variant::ALL, &seeds, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, seed_ensemble, variant_comparison);
criterion_main!(benches);
