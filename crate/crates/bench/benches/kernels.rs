use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use skewho::hypocoercivity::{evolve, EvolveOptions};
use skewho::linalg::{all_eigenvalues, banded_lu_solve, smallest_singular_value, sturm_min_eigenvalue};
use skewho::model::{assemble_h, assemble_hat_h, HatWeight};
use skewho::pseudospectrum::kappa;
use skewho::spectrum::compute_spectrum;
use skewho::{Complex64, Grid, OperatorConfig, Potential, SolverSettings};

fn fex() -> Potential {
    Potential::power_decay(4.0).unwrap()
}

fn linalg(c: &mut Criterion) {
    let p = fex();
    let s = SolverSettings::default();
    let mut g = c.benchmark_group("linalg");
    for n in [1000usize, 4000, 16000] {
        let grid = Grid::symmetric(20.0, n).unwrap();
        let a = assemble_h(&OperatorConfig::new(&p, 2f64.powi(-10), 700.0), &grid).unwrap();
        let b = vec![Complex64::new(1.0, 0.0); n];
        g.bench_with_input(BenchmarkId::new("banded_lu_solve", n), &n, |bch, _| bch.iter(|| banded_lu_solve(black_box(&a), &b).unwrap()));
        g.bench_with_input(BenchmarkId::new("smallest_singular_value", n), &n, |bch, _| {
            bch.iter(|| smallest_singular_value(black_box(&a), &s).unwrap())
        });
        let t = assemble_hat_h(&p, 2f64.powi(-10), &grid, HatWeight::Commutator).unwrap();
        g.bench_with_input(BenchmarkId::new("sturm_min_eigenvalue", n), &n, |bch, _| bch.iter(|| sturm_min_eigenvalue(black_box(&t)).unwrap()));
    }
    for n in [128usize, 512] {
        let grid = Grid::symmetric(10.0, n).unwrap();
        let a = assemble_h(&OperatorConfig::new(&p, 0.05, 0.0), &grid).unwrap();
        g.bench_with_input(BenchmarkId::new("all_eigenvalues", n), &n, |bch, _| bch.iter(|| all_eigenvalues(black_box(&a), &s).unwrap()));
    }
    g.finish();
}

fn analyses(c: &mut Criterion) {
    let p = fex();
    let s = SolverSettings::default();
    let mut g = c.benchmark_group("analyses");
    g.sample_size(10);
    let grid = Grid::symmetric(20.0, 2000).unwrap();
    g.bench_function("kappa_2000", |b| b.iter(|| kappa(&p, 2f64.powi(-10), black_box(700.0), &grid, &s).unwrap()));
    let table = Grid::symmetric(26.94, 2001).unwrap();
    g.bench_function("compute_spectrum_table1", |b| b.iter(|| compute_spectrum(&p, 2f64.powi(-18), black_box(&table), 5).unwrap()));
    let q = Potential::quadratic();
    let small = Grid::symmetric(8.0, 1001).unwrap();
    let opts = EvolveOptions { t_final: 0.5, stride: 50, ..EvolveOptions::default() };
    g.bench_function("evolve_quadratic", |b| b.iter(|| evolve(&q, 0.01, black_box(&small), None, &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, linalg, analyses);
criterion_main!(benches);
