use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qosa_core::random;
use qosa_core::{c_value, certify_preset, mub_family, optimize, SearchProblem, SubAlgebra};

fn bench_generate(c: &mut Criterion) {
    let mut rng = random::seeded_rng(1);
    let g1 = random::hermitian(4, &mut rng);
    let g2 = random::hermitian(4, &mut rng);
    c.bench_function("generate_two_hermitians_m4", |b| {
        b.iter(|| SubAlgebra::generate(4, black_box(&[g1.clone(), g2.clone()]), 1e-9).unwrap())
    });
}

fn bench_commutant(c: &mut Criterion) {
    let mut rng = random::seeded_rng(2);
    let g = random::hermitian(6, &mut rng);
    let alg = SubAlgebra::generate(6, &[g], 1e-9).unwrap();
    c.bench_function("commutant_generated_m6", |b| {
        // rebuilding drops the cache, so each iteration solves the nullspace
        b.iter(|| {
            let fresh = SubAlgebra::from_basis(alg.basis().to_vec(), 1e-9).unwrap();
            black_box(fresh.commutant(1e-9))
        })
    });
}

fn bench_c_value(c: &mut Criterion) {
    let fam = mub_family(7).unwrap();
    let names = fam.names();
    let a = fam.get(&names[0]).unwrap().clone();
    let b = fam.get(&names[1]).unwrap().clone();
    c.bench_function("c_value_mub_pair_m7", |bch| {
        bch.iter(|| c_value(black_box(&a), black_box(&b)).unwrap())
    });
}

fn bench_certify(c: &mut Criterion) {
    c.bench_function("certify_m6_5masa_3factor", |b| {
        b.iter(|| certify_preset(black_box("m6-5masa-3factor"), None).unwrap())
    });
}

fn bench_search(c: &mut Criterion) {
    let masa = {
        let fam = mub_family(3).unwrap();
        let names = fam.names();
        fam.get(&names[0]).unwrap().clone()
    };
    let mut problem = SearchProblem::new(vec![
        ("fixed".into(), masa.clone()),
        ("moving".into(), masa),
    ])
    .unwrap();
    problem.frozen = vec![0];
    problem.restarts = 1;
    problem.max_iters = 25;
    problem.tol_defect = 1e-12;
    c.bench_function("search_25_iterations_m3", |b| {
        b.iter(|| optimize(black_box(&problem)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_generate,
    bench_commutant,
    bench_c_value,
    bench_certify,
    bench_search
);
criterion_main!(benches);
