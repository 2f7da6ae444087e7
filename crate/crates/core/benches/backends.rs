use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sinemap::assembly::assemble_helmholtz_1d;
use sinemap::bench::{run_convergence_1d, BenchCase1D, CaseKind, ConvergenceConfig, Density3DCase, ParityMode};
use sinemap::hartree::{apply_overlap_3d, build_overlap_matrix};
use sinemap::projection::{build_quadrature, project_1d_with};
use sinemap::solvers::{kronecker_apply_with, solve_3d_with, SolveOptions};
use sinemap::{Backend, MomentTensor3D, SineExpansion3D, Tensor3};

const BACKENDS: [(&str, Backend); 2] = [("sequential", Backend::Sequential), ("parallel", Backend::Parallel)];

fn filled(n: usize) -> Tensor3 {
    Tensor3::from_fn(n, |i, j, k| 1.0 / (1.0 + (i + 2 * j + 3 * k) as f64))
}

fn kronecker(c: &mut Criterion) {
    let mut g = c.benchmark_group("kronecker_apply");
    for n in [25, 37, 61] {
        let m = assemble_helmholtz_1d(n, 0.0).unwrap();
        let x = SineExpansion3D(filled(n));
        for (name, backend) in BACKENDS {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| kronecker_apply_with(backend, black_box(&m), black_box(&x)).unwrap())
            });
        }
    }
    g.finish();
}

fn overlap(c: &mut Criterion) {
    let mut g = c.benchmark_group("overlap_contraction");
    for n in [25, 61] {
        let e = build_overlap_matrix(n).unwrap();
        let t = filled(n);
        for (name, backend) in BACKENDS {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| apply_overlap_3d(backend, &e, black_box(&t), [0, 1, 2]))
            });
        }
    }
    g.finish();
}

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_3d");
    g.sample_size(10);
    let n = 15;
    let rule = build_quadrature(256).unwrap();
    let m = assemble_helmholtz_1d(n, 0.0).unwrap();
    let f = MomentTensor3D(Density3DCase::rhs_moments(&rule, n).unwrap().0);
    for (name, backend) in BACKENDS {
        let opts = SolveOptions { backend, ..Default::default() };
        g.bench_function(BenchmarkId::new(name, n), |b| b.iter(|| solve_3d_with(&m, black_box(&f), &opts).unwrap()));
    }
    g.finish();
}

fn projection(c: &mut Criterion) {
    let mut g = c.benchmark_group("project_1d");
    let rule = build_quadrature(2048).unwrap();
    for (name, backend) in BACKENDS {
        g.bench_function(BenchmarkId::new(name, 256), |b| {
            b.iter(|| project_1d_with(backend, |y| (-y.cos().powi(2)).exp(), black_box(&rule), 256).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("convergence_sweep");
    g.sample_size(10);
    let case = BenchCase1D::new(CaseKind::AlgOsc, 2.0, 3.5, 2.0).unwrap();
    for (name, backend) in BACKENDS {
        let cfg = ConvergenceConfig { parity: ParityMode::Full, backend, ..Default::default() };
        g.bench_function(name, |b| b.iter(|| run_convergence_1d(&case, &[16, 32, 64, 128, 256], &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, kronecker, overlap, solve, projection, sweep);
criterion_main!(benches);
