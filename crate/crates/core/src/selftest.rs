//! Quick internal consistency checks, run by the `selftest` subcommand.
//!
//! Each check compares a fast path against an independent route from
//! [`crate::oracle`] at small sizes and finishes in well under a second.

use std::f64::consts::PI;
use std::fmt;

use crate::assembly::{assemble_helmholtz_1d, assemble_m12, assemble_m2};
use crate::bench::{table_row, BenchCase1D, CaseKind, Density3DCase};
use crate::error::Result;
use crate::exec::Backend;
use crate::expansion::{MomentTensor3D, SineExpansion3D, Tensor3};
use crate::hartree::{build_overlap_matrix, hartree_energy};
use crate::mapping::{eval_expansion_physical, to_physical_interior};
use crate::oracle;
use crate::projection::{build_quadrature, project_1d_physical};
use crate::solvers::{kronecker_apply, kronecker_apply_with, solve_1d, solve_3d, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Measured discrepancy.
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<40} {:.3e} (tol {:.0e})", self.name, self.value, self.tolerance)
    }
}

/// Deterministic pseudo-random fill, good enough for test vectors.
fn lcg_fill(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed;
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn run_all() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let rule = build_quadrature(256)?;

    let n = 32;
    let (m2, m12) = (assemble_m2(n)?, assemble_m12(n)?);
    let mut d2: f64 = 0.0;
    let mut d12: f64 = 0.0;
    for i in 1..=n {
        for j in 1..=n {
            d2 = d2.max((m2.get(i - 1, j - 1) - oracle::quadrature_m2(&rule, i, j)).abs());
            d12 = d12.max((m12.get(i - 1, j - 1) - oracle::quadrature_m12(&rule, i, j)).abs());
        }
    }
    out.push(Check { name: "M2 closed form vs quadrature, N=32", value: d2, tolerance: 1e-10 });
    out.push(Check { name: "M12 closed form vs quadrature, N=32", value: d12, tolerance: 1e-10 });

    let e = build_overlap_matrix(n)?;
    let mut de: f64 = 0.0;
    for i in 1..=n {
        for j in 1..=n {
            de = de.max((e.get(i - 1, j - 1) - oracle::quadrature_overlap(&rule, i, j)).abs());
        }
    }
    out.push(Check { name: "overlap closed form vs quadrature, N=32", value: de, tolerance: 1e-8 });

    let m = assemble_helmholtz_1d(3, 0.7)?;
    let dense = oracle::dense_kronecker_sum(&m);
    let c = Tensor3::from_vec(3, lcg_fill(27, 1))?;
    let fast = kronecker_apply(&m, &SineExpansion3D(c.clone()))?;
    let slow = oracle::dense_matvec(&dense, c.as_slice());
    out.push(Check {
        name: "Kronecker action vs dense, N=3",
        value: max_abs_diff(fast.0.as_slice(), &slow),
        tolerance: 1e-12,
    });

    let seq = kronecker_apply_with(Backend::Sequential, &m, &SineExpansion3D(c.clone()))?;
    let par = kronecker_apply_with(Backend::Parallel, &m, &SineExpansion3D(c))?;
    out.push(Check {
        name: "sequential vs parallel backend",
        value: max_abs_diff(seq.0.as_slice(), par.0.as_slice()),
        tolerance: 0.0,
    });

    let f = Tensor3::from_vec(3, lcg_fill(27, 2))?;
    let (x, _) = solve_3d(&m, &MomentTensor3D(f.clone()), 1e-14, 200)?;
    let want = oracle::dense_solve(&dense, f.as_slice()).unwrap_or_default();
    out.push(Check {
        name: "BiCGSTAB vs dense solve, N=3",
        value: max_abs_diff(x.0.as_slice(), &want),
        tolerance: 1e-8,
    });

    let c2 = Tensor3::from_vec(2, lcg_fill(8, 3))?;
    let f2 = Tensor3::from_vec(2, lcg_fill(8, 4))?;
    let k3 = oracle::dense_kron3(build_overlap_matrix(2)?.as_slice(), 2);
    let fast = hartree_energy(&SineExpansion3D(c2.clone()), &MomentTensor3D(f2.clone()), 1.0)?;
    let slow = oracle::dense_bilinear(&c2, &k3, &f2);
    out.push(Check { name: "Hartree contraction vs dense, N=2", value: (fast - slow).abs(), tolerance: 1e-12 });

    let case = BenchCase1D::new(CaseKind::Alg, 0.0, 3.5, 2.0)?;
    let a = assemble_helmholtz_1d(16, case.gamma)?;
    let rhs = project_1d_physical(|x| case.forcing(x), &build_quadrature(1024)?, 16)?;
    let u = solve_1d(&a, &rhs)?;
    let err = (1..200)
        .map(|j| {
            let x = to_physical_interior(PI * j as f64 / 200.0);
            (eval_expansion_physical(&u, x) - case.exact(x)).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check { name: "exactly representable 1D solution, N=16", value: err, tolerance: 1e-13 });

    let row = table_row(&Density3DCase::new(0.0)?, 15, &SolveOptions::default())?;
    out.push(Check { name: "energy table k²=0, N=15", value: (row.energy - 1.3169389525).abs(), tolerance: 1e-6 });

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_all().unwrap() {
            assert!(c.passed(), "{c}");
        }
    }
}
