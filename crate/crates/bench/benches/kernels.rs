use criterion::{black_box, criterion_group, criterion_main, Criterion};

use grazelab::basis::BasisSpec;
use grazelab::experiments::identities::symbol_quadrature;
use grazelab::experiments::toy_norm;
use grazelab::norms::NormGrams;
use grazelab::operators::{assemble_l_eps, assemble_l_landau, trilinear_eps};
use grazelab::ModelParams;

fn params() -> ModelParams {
    ModelParams::validate(-1.0, 0.75, 0.1).unwrap()
}

fn assembly(c: &mut Criterion) {
    let p = params();
    let mut g = c.benchmark_group("assembly");
    g.sample_size(10);
    for k in [4, 6] {
        let spec = BasisSpec::new(k);
        g.bench_function(format!("l_eps_K{k}"), |b| b.iter(|| assemble_l_eps(&spec, black_box(&p)).unwrap()));
        g.bench_function(format!("l_landau_K{k}"), |b| b.iter(|| assemble_l_landau(&spec, black_box(&p)).unwrap()));
    }
    g.bench_function("trilinear_3_3_6", |b| b.iter(|| trilinear_eps(black_box(&p), [3, 3, 6]).unwrap()));
    g.finish();
}

fn norms(c: &mut Criterion) {
    let spec = BasisSpec::new(4);
    let mut g = c.benchmark_group("norms");
    g.sample_size(10);
    g.bench_function("norm_grams_K4", |b| b.iter(|| NormGrams::build(&spec, -0.5, 0.75, black_box(&[0.1])).unwrap()));
    g.finish();
}

fn scalar(c: &mut Criterion) {
    let p = params();
    let toy = ModelParams::validate(-2.0, 0.75, 0.1).unwrap();
    c.bench_function("symbol_quadrature", |b| b.iter(|| symbol_quadrature(&p, black_box(20.0))));
    c.bench_function("toy_norm_t100", |b| b.iter(|| toy_norm(&toy, 0.05, 0.2, 1.0, black_box(100.0), 1e-12).unwrap()));
}

criterion_group!(benches, assembly, norms, scalar);
criterion_main!(benches);
