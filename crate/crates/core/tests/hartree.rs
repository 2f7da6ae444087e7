use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sinemap::assembly::assemble_helmholtz_1d;
use sinemap::bench::{
    density_factor_cubic, density_factor_linear, table_quadrature_points, table_row, Density3DCase, TABLE_ENERGY_SCALE,
};
use sinemap::hartree::{apply_overlap_3d, build_overlap_matrix, hartree_energy, hartree_energy_with};
use sinemap::oracle::quadrature_overlap;
use sinemap::projection::{build_quadrature, project_1d_physical};
use sinemap::solvers::{solve_3d_with, SolveOptions};
use sinemap::{Backend, MomentTensor3D, SineExpansion3D, Tensor3};

fn random_tensor(rng: &mut ChaCha8Rng, n: usize) -> Tensor3 {
    Tensor3::from_vec(n, (0..n * n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn energy(c: &Tensor3, f: &Tensor3) -> f64 {
    hartree_energy(&SineExpansion3D(c.clone()), &MomentTensor3D(f.clone()), 1.0).unwrap()
}

#[test]
fn overlap_matches_defining_integral() {
    let rule = build_quadrature(256).unwrap();
    let e = build_overlap_matrix(16).unwrap();
    for i in 1..=16 {
        for j in 1..=16 {
            let q = quadrature_overlap(&rule, i, j);
            assert!((e.get(i - 1, j - 1) - q).abs() <= 1e-8, "({i},{j}): {q}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bilinear_in_each_argument(n in 1usize..8, a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c1, c2, f1, f2) = (random_tensor(&mut rng, n), random_tensor(&mut rng, n), random_tensor(&mut rng, n), random_tensor(&mut rng, n));
        let mut c = c1.clone().scaled(a);
        c.add_scaled(b, &c2);
        let lhs = energy(&c, &f1);
        let rhs = a * energy(&c1, &f1) + b * energy(&c2, &f1);
        let scale = 1.0 + energy(&c1, &f1).abs() + energy(&c2, &f1).abs();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale * (1.0 + a.abs() + b.abs()));

        let mut f = f1.clone().scaled(a);
        f.add_scaled(b, &f2);
        let lhs = energy(&c1, &f);
        let rhs = a * energy(&c1, &f1) + b * energy(&c1, &f2);
        let scale = 1.0 + energy(&c1, &f1).abs() + energy(&c1, &f2).abs();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn symmetric_in_its_arguments(n in 1usize..10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, f) = (random_tensor(&mut rng, n), random_tensor(&mut rng, n));
        let (x, y) = (energy(&c, &f), energy(&f, &c));
        prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
    }

    #[test]
    fn contraction_order_is_irrelevant(n in 1usize..10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tensor(&mut rng, n);
        let e = build_overlap_matrix(n).unwrap();
        let base = apply_overlap_3d(Backend::Sequential, &e, &t, [0, 1, 2]);
        let scale = base.max_abs().max(1.0);
        for order in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let other = apply_overlap_3d(Backend::Parallel, &e, &t, order);
            prop_assert!(other.max_abs_diff(&base) <= 1e-12 * scale);
        }
    }
}

#[test]
fn backends_give_identical_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (c, f) = (random_tensor(&mut rng, 13), random_tensor(&mut rng, 13));
    let seq = hartree_energy_with(Backend::Sequential, &SineExpansion3D(c.clone()), &MomentTensor3D(f.clone()), 1.0);
    let par = hartree_energy_with(Backend::Parallel, &SineExpansion3D(c), &MomentTensor3D(f), 1.0);
    assert_eq!(seq.unwrap(), par.unwrap());
}

/// `(1/4π) ∫ V ρ d³x` computed without the overlap matrix: with `dx = dy/sin²y`
/// on each axis, `∫ V ρ = Σ c_lmn G_lmn` where `G` holds the moments of
/// `ρ(x) Π(1 + x_i²)`. Both routes share only the solved coefficients. The
/// overlap route sees `ρ` truncated to `N` modes, so the two differ by a
/// truncation gap that must shrink with `N`; a wrong scale would leave a
/// fixed ratio instead.
#[test]
fn energy_scale_matches_direct_integral() {
    let rule = build_quadrature(512).unwrap();
    for ksq in [0.0, 1.0] {
        let mut gaps = Vec::new();
        for n in [15, 25, 37] {
            let axis = assemble_helmholtz_1d(n, ksq / 3.0).unwrap();
            let rhs = Density3DCase::rhs_moments(&build_quadrature(table_quadrature_points(n)).unwrap(), n).unwrap();
            let scaled = MomentTensor3D(rhs.tensor().clone().scaled(4.0 / (PI * PI)));
            let (c, report) = solve_3d_with(&axis, &scaled, &SolveOptions::default()).unwrap();
            assert!(report.converged);

            let a = project_1d_physical(|x| density_factor_linear(x) * (1.0 + x * x), &rule, n).unwrap();
            let b = project_1d_physical(|x| density_factor_cubic(x) * (1.0 + x * x), &rule, n).unwrap();
            let (a, b) = (a.values(), b.values());
            let mut g = Tensor3::outer(a, a, a).scaled(6.0);
            g.add_scaled(4.0, &Tensor3::outer(b, a, a));
            g.add_scaled(4.0, &Tensor3::outer(a, b, a));
            g.add_scaled(4.0, &Tensor3::outer(a, a, b));
            let direct = c.0.as_slice().iter().zip(g.as_slice()).map(|(x, y)| x * y).sum::<f64>() / (4.0 * PI);

            let via_overlap = hartree_energy(&c, &rhs, TABLE_ENERGY_SCALE).unwrap();
            let row = table_row(&Density3DCase::new(ksq).unwrap(), n, &SolveOptions::default()).unwrap();
            assert!((row.energy - via_overlap).abs() <= 1e-12, "k²={ksq} N={n}");
            gaps.push((direct - via_overlap).abs());
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0] / 10.0), "k²={ksq}: {gaps:?}");
        assert!(gaps[2] <= 1e-6, "k²={ksq}: {gaps:?}");
    }
}
