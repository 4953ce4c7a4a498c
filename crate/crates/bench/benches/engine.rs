use criterion::{criterion_group, criterion_main, Criterion};
use polproj_bench::cases;
use polproj_core::forms::{FormSpec, Kind};
use polproj_core::polar::PolarSpace;
use polproj_core::verify::{generate, RunConfig};

fn generation(c: &mut Criterion) {
    let cfg = RunConfig::default();
    let mut g = c.benchmark_group("generate");
    g.sample_size(10);
    for case in cases() {
        g.bench_function(case.name, |b| b.iter(|| generate(&case.space, case.sel, &cfg).unwrap()));
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    g.sample_size(10);
    let spec = FormSpec::from_params(Kind::Symplectic, 3, 3, 0).unwrap();
    g.bench_function("W(5,3)", |b| b.iter(|| PolarSpace::build(spec.clone()).unwrap()));
    g.finish();
}

criterion_group!(benches, generation, enumeration);
criterion_main!(benches);
