use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use polychain_core::catalog;
use polychain_core::closure::{build_presentation, change_basis, PresentationOptions};
use polychain_core::commutant::run;
use polychain_core::enveloping::{lift_cubic, Enveloping};
use polychain_core::{lp_bracket, CommutantBasis};

fn su3_setup() -> (polychain_core::LieAlgebra, Vec<usize>, CommutantBasis) {
    let alg = catalog::algebra("su3").unwrap();
    let ch = catalog::chain("su3", "so3", &alg).unwrap();
    let imposed = ch.imposed(false);
    let basis = CommutantBasis::from_named(&alg, catalog::published_basis("su3", &alg).unwrap());
    let spec = catalog::published_basis_change("su3").unwrap();
    let basis = change_basis(&alg, &imposed, &basis, &spec).unwrap().basis;
    (alg, imposed, basis)
}

fn bracket(c: &mut Criterion) {
    let (alg, _, basis) = su3_setup();
    let a = &basis.entries[basis.position("A").unwrap()].poly;
    let b = &basis.entries[basis.position("C").unwrap()].poly;
    c.bench_function("lp_bracket su3 A,C", |bn| bn.iter(|| lp_bracket(a, b, &alg)));
}

fn commutant(c: &mut Criterion) {
    let mut g = c.benchmark_group("commutant");
    g.sample_size(10);
    for (name, sub, deg) in [("su3", "so3", 6), ("so5", "su2xu1", 6), ("schr3", "sl2xso2", 4)] {
        let alg = catalog::algebra(name).unwrap();
        let imposed = catalog::chain(name, sub, &alg).unwrap().imposed(false);
        g.bench_function(format!("{name} to degree {deg}"), |bn| bn.iter(|| run(&alg, &imposed, deg, None)));
    }
    g.finish();
}

fn closure(c: &mut Criterion) {
    let (alg, _, basis) = su3_setup();
    let mut g = c.benchmark_group("closure");
    g.sample_size(10);
    g.bench_function("su3 presentation", |bn| {
        bn.iter(|| build_presentation(&alg, &basis, &PresentationOptions::default()).unwrap())
    });
    g.finish();
}

fn enveloping(c: &mut Criterion) {
    let (alg, _, basis) = su3_setup();
    let pres = build_presentation(&alg, &basis, &PresentationOptions::default()).unwrap();
    let mut g = c.benchmark_group("enveloping");
    g.sample_size(10);
    g.bench_function("su3 symmetrize C", |bn| {
        let c_poly = &basis.entries[basis.position("C").unwrap()].poly;
        bn.iter_batched(
            || Enveloping::new(&alg),
            |env| env.symmetrize(c_poly).unwrap(),
            BatchSize::SmallInput,
        )
    });
    g.bench_function("su3 cubic lift", |bn| {
        bn.iter_batched(
            || Enveloping::new(&alg),
            |env| lift_cubic(&env, &pres, &basis).unwrap().records.len(),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, bracket, commutant, closure, enveloping);
criterion_main!(benches);
