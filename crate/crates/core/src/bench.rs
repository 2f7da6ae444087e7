//! Reproduction pipelines: 1D convergence studies for three decay classes and
//! the 3D Hartree-energy table for a model charge density.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::assembly::assemble_helmholtz_1d;
use crate::error::{Error, Result};
use crate::exec::{self, Backend};
use crate::expansion::{MomentTensor3D, Parity, Tensor3};
use crate::hartree::hartree_energy_with;
use crate::mapping::{eval_expansion_physical, to_physical_interior};
use crate::projection::{build_quadrature, project_1d_physical, QuadratureRule};
use crate::solvers::{solve_1d, solve_1d_parity, solve_3d_with, SolveOptions, SolveReport};

/// Exact solutions of `-u'' + γu = f` used for the 1D studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// `sin(kx) e^{-x²}`
    ExpOsc,
    /// `(1 + x²)^{-h}`
    Alg,
    /// `sin(kx) (1 + x²)^{-h}`
    AlgOsc,
}

impl CaseKind {
    pub fn id(self) -> &'static str {
        match self {
            CaseKind::ExpOsc => "exp-osc",
            CaseKind::Alg => "alg",
            CaseKind::AlgOsc => "alg-osc",
        }
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for CaseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp-osc" => Ok(CaseKind::ExpOsc),
            "alg" => Ok(CaseKind::Alg),
            "alg-osc" => Ok(CaseKind::AlgOsc),
            other => Err(Error::invalid(format!("unknown case '{other}' (expected exp-osc, alg or alg-osc)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchCase1D {
    pub kind: CaseKind,
    pub k: f64,
    pub h: f64,
    pub gamma: f64,
}

impl BenchCase1D {
    pub fn new(kind: CaseKind, k: f64, h: f64, gamma: f64) -> Result<Self> {
        if !(k.is_finite() && h.is_finite() && gamma.is_finite()) {
            return Err(Error::invalid("case parameters must be finite"));
        }
        if matches!(kind, CaseKind::Alg | CaseKind::AlgOsc) && h <= 0.0 {
            return Err(Error::invalid(format!("decay exponent h must be positive, got {h}")));
        }
        Ok(Self { kind, k, h, gamma })
    }

    pub fn exact(&self, x: f64) -> f64 {
        let (k, h) = (self.k, self.h);
        match self.kind {
            CaseKind::ExpOsc => (k * x).sin() * (-x * x).exp(),
            CaseKind::Alg => (1.0 + x * x).powf(-h),
            CaseKind::AlgOsc => (k * x).sin() * (1.0 + x * x).powf(-h),
        }
    }

    /// `f = -u'' + γ u`, differentiated by hand.
    pub fn forcing(&self, x: f64) -> f64 {
        let (k, h, g) = (self.k, self.h, self.gamma);
        match self.kind {
            CaseKind::ExpOsc => {
                let (s, c) = (k * x).sin_cos();
                (-x * x).exp() * ((2.0 + k * k - 4.0 * x * x + g) * s + 4.0 * k * x * c)
            }
            CaseKind::Alg => {
                let q = 1.0 + x * x;
                let w = q.powf(-h);
                let w2 = -2.0 * h * w / q + 4.0 * h * (h + 1.0) * x * x * w / (q * q);
                -w2 + g * w
            }
            CaseKind::AlgOsc => {
                let q = 1.0 + x * x;
                let w = q.powf(-h);
                let w1 = -2.0 * h * x * w / q;
                let w2 = -2.0 * h * w / q + 4.0 * h * (h + 1.0) * x * x * w / (q * q);
                let (s, c) = (k * x).sin_cos();
                let u2 = -k * k * s * w + 2.0 * k * c * w1 + s * w2;
                -u2 + g * s * w
            }
        }
    }

    /// Symmetry of `u` about `y = π/2`.
    pub fn parity(&self) -> Parity {
        match self.kind {
            CaseKind::Alg => Parity::Symmetric,
            CaseKind::ExpOsc | CaseKind::AlgOsc => Parity::Antisymmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityMode {
    Full,
    Restricted,
}

impl fmt::Display for ParityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityMode::Full => "full",
            ParityMode::Restricted => "restricted",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub case: CaseKind,
    pub n: usize,
    /// NaN when the solve failed.
    pub max_norm_error: f64,
    pub wall_time: f64,
    pub parity_mode: ParityMode,
    /// Unknowns actually solved for.
    pub unknowns: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceConfig {
    pub samples: usize,
    pub parity: ParityMode,
    /// `None` means [`convergence_quadrature_points`].
    pub quad_points: Option<usize>,
    pub backend: Backend,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self { samples: 1000, parity: ParityMode::Full, quad_points: None, backend: Backend::default() }
    }
}

/// Quadrature size for the 1D forcing moments. The oscillatory algebraic case
/// has `sin(k cot y)` behaviour at the endpoints, so the rule is kept well
/// above the two-points-per-wave minimum.
pub fn convergence_quadrature_points(n: usize) -> usize {
    (8 * n).max(1024)
}

/// `samples` points uniform in `y` strictly inside `(0, π)`.
pub fn sample_grid(samples: usize) -> Vec<f64> {
    (1..=samples).map(|j| PI * j as f64 / (samples + 1) as f64).collect()
}

fn solve_case_at(
    case: &BenchCase1D,
    n: usize,
    rule: &QuadratureRule,
    cfg: &ConvergenceConfig,
    grid: &[f64],
) -> Result<(f64, usize)> {
    let m = assemble_helmholtz_1d(n, case.gamma)?;
    let f = project_1d_physical(|x| case.forcing(x), rule, n)?;
    let (c, unknowns) = match cfg.parity {
        ParityMode::Full => (solve_1d(&m, &f)?, n),
        ParityMode::Restricted => {
            let p = case.parity();
            (solve_1d_parity(&m, &f, p)?, p.kept_modes(n).len())
        }
    };
    let err = grid
        .iter()
        .map(|&y| {
            let x = to_physical_interior(y);
            (eval_expansion_physical(&c, x) - case.exact(x)).abs()
        })
        .fold(0.0, f64::max);
    Ok((err, unknowns))
}

/// One record per entry of `n_list`, in order. A failed solve yields a
/// NaN error and the sweep continues.
pub fn run_convergence_1d(
    case: &BenchCase1D,
    n_list: &[usize],
    cfg: &ConvergenceConfig,
) -> Result<Vec<ConvergenceRecord>> {
    if n_list.is_empty() {
        return Err(Error::invalid("N list is empty"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("N list must be strictly ascending"));
    }
    if n_list[0] == 0 {
        return Err(Error::invalid("basis size must be at least 1"));
    }
    if cfg.samples < 100 {
        return Err(Error::invalid(format!("need at least 100 sample points, got {}", cfg.samples)));
    }
    let grid = sample_grid(cfg.samples);
    let rules = n_list
        .iter()
        .map(|&n| build_quadrature(cfg.quad_points.unwrap_or_else(|| convergence_quadrature_points(n)).max(2 * n)))
        .collect::<Result<Vec<_>>>()?;
    let records = exec::map_indices(cfg.backend, n_list.len(), |i| {
        let n = n_list[i];
        let start = Instant::now();
        let (err, unknowns) = solve_case_at(case, n, &rules[i], cfg, &grid).unwrap_or((f64::NAN, 0));
        ConvergenceRecord {
            case: case.kind,
            n,
            max_norm_error: err,
            wall_time: start.elapsed().as_secs_f64(),
            parity_mode: cfg.parity,
            unknowns,
        }
    });
    Ok(records)
}

/// Scale from `cᵀ(E⊗E⊗E)F` to the tabulated energy, with `c` the sine
/// coefficients of `V` and `F` the raw moments of `4πρ`: the tabulated value
/// is `(1/4π) ∫ V ρ d³x` where `-∇²V + k²V = 4πρ`.
pub const TABLE_ENERGY_SCALE: f64 = 8.0 / (PI * PI * PI) / (16.0 * PI * PI);

/// `ρ = x₁x₂x₃ (6 + 4r²) e^{-r²}` screened by `k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density3DCase {
    pub ksq: f64,
}

/// `x e^{-x²}`
pub fn density_factor_linear(x: f64) -> f64 {
    x * (-x * x).exp()
}

/// `x³ e^{-x²}`
pub fn density_factor_cubic(x: f64) -> f64 {
    x * x * x * (-x * x).exp()
}

impl Density3DCase {
    pub fn new(ksq: f64) -> Result<Self> {
        if !ksq.is_finite() {
            return Err(Error::invalid("k² must be finite"));
        }
        Ok(Self { ksq })
    }

    pub fn density(x1: f64, x2: f64, x3: f64) -> f64 {
        let r2 = x1 * x1 + x2 * x2 + x3 * x3;
        x1 * x2 * x3 * (6.0 + 4.0 * r2) * (-r2).exp()
    }

    /// Raw moments of `4πρ`. Since `6 + 4r² = 6 + 4x₁² + 4x₂² + 4x₃²`, the
    /// density is four separable products of `x e^{-x²}` and `x³ e^{-x²}`.
    pub fn rhs_moments(rule: &QuadratureRule, n: usize) -> Result<MomentTensor3D> {
        let a = project_1d_physical(density_factor_linear, rule, n)?;
        let b = project_1d_physical(density_factor_cubic, rule, n)?;
        let (a, b) = (a.values(), b.values());
        let mut t = Tensor3::outer(a, a, a).scaled(6.0);
        t.add_scaled(4.0, &Tensor3::outer(b, a, a));
        t.add_scaled(4.0, &Tensor3::outer(a, b, a));
        t.add_scaled(4.0, &Tensor3::outer(a, a, b));
        Ok(MomentTensor3D(t.scaled(4.0 * PI)))
    }
}

/// Quadrature size for the separable density moments.
pub fn table_quadrature_points(n: usize) -> usize {
    (8 * n).max(256)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub energy: f64,
    pub report: SolveReport,
}

/// Solve at one basis size and evaluate the energy.
pub fn table_row(case: &Density3DCase, n: usize, opts: &SolveOptions) -> Result<TableRow> {
    let start = Instant::now();
    let rule = build_quadrature(table_quadrature_points(n))?;
    // Solving on the three axes, the Galerkin mass of the two passive axes is
    // (π/2)² and the screening term must enter once, not once per axis.
    let axis = assemble_helmholtz_1d(n, case.ksq / 3.0)?;
    let rhs = Density3DCase::rhs_moments(&rule, n)?;
    let scaled = MomentTensor3D(rhs.0.clone().scaled(4.0 / (PI * PI)));
    let (c, mut report) = solve_3d_with(&axis, &scaled, opts)?;
    let energy = hartree_energy_with(opts.backend, &c, &rhs, TABLE_ENERGY_SCALE)?;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(TableRow { n, energy, report })
}

/// Rows follow `n_list` order. Basis sizes run one after another; the
/// parallelism is inside each solve.
pub fn run_table_3d(case: &Density3DCase, n_list: &[usize], opts: &SolveOptions) -> Result<Vec<TableRow>> {
    if n_list.is_empty() {
        return Err(Error::invalid("N list is empty"));
    }
    n_list.iter().map(|&n| table_row(case, n, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::second_derivative;

    #[test]
    fn case_ids_round_trip() {
        for k in [CaseKind::ExpOsc, CaseKind::Alg, CaseKind::AlgOsc] {
            assert_eq!(k.id().parse::<CaseKind>().unwrap(), k);
        }
        assert!("gauss".parse::<CaseKind>().is_err());
    }

    #[test]
    fn forcing_matches_finite_differences() {
        let cases = [
            BenchCase1D::new(CaseKind::ExpOsc, 2.0, 0.0, 2.0).unwrap(),
            BenchCase1D::new(CaseKind::Alg, 0.0, 2.0, 2.0).unwrap(),
            BenchCase1D::new(CaseKind::Alg, 0.0, 3.5, 2.0).unwrap(),
            BenchCase1D::new(CaseKind::AlgOsc, 2.0, 3.5, 2.0).unwrap(),
        ];
        for case in cases {
            for i in 0..20 {
                let x = -4.0 + 8.0 * i as f64 / 19.0 + 0.013;
                let fd = -second_derivative(|t| case.exact(t), x, 1e-3) + case.gamma * case.exact(x);
                assert!((fd - case.forcing(x)).abs() < 1e-6, "{:?} at {x}", case.kind);
            }
        }
    }

    #[test]
    fn density_is_odd_per_axis() {
        let r = Density3DCase::density(0.3, -0.7, 1.1);
        assert_eq!(Density3DCase::density(-0.3, -0.7, 1.1), -r);
        assert_eq!(Density3DCase::density(0.3, 0.7, 1.1), -r);
        assert_eq!(Density3DCase::density(0.3, -0.7, -1.1), -r);
    }

    #[test]
    fn convergence_rejects_bad_inputs() {
        let case = BenchCase1D::new(CaseKind::Alg, 0.0, 2.0, 2.0).unwrap();
        let cfg = ConvergenceConfig::default();
        assert!(run_convergence_1d(&case, &[], &cfg).is_err());
        assert!(run_convergence_1d(&case, &[16, 8], &cfg).is_err());
        let few = ConvergenceConfig { samples: 50, ..cfg };
        assert!(run_convergence_1d(&case, &[8], &few).is_err());
    }
}
