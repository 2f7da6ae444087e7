//! Forcing moments `f_m = int_0^pi sin(m y) f(y) dy` by Gauss-Legendre
//! quadrature on `(0, pi)`, plus the moment/coefficient conversions.

use std::f64::consts::{FRAC_PI_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::exec::{self, Backend};
use crate::expansion::{MomentTensor3D, MomentVector, SineExpansion1D, Tensor3};
use crate::mapping::to_physical_interior;

/// Smallest rule [`build_quadrature`] will produce.
pub const MIN_QUADRATURE_POINTS: usize = 8;

/// Gauss-Legendre nodes and weights on `(0, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Plain weighted sum, in node order.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&y, &w)| w * f(y)).sum()
    }

    fn sample(&self, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .map(|&y| {
                let v = f(y);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Evaluation { node: y, value: v })
                }
            })
            .collect()
    }
}

/// Number of nodes used when a caller does not pick one: at least 64 and at
/// least two per oscillation of the highest mode.
pub fn default_quadrature_points(n_modes: usize) -> usize {
    (2 * n_modes).max(64)
}

pub fn build_quadrature(n_points: usize) -> Result<QuadratureRule> {
    if n_points < MIN_QUADRATURE_POINTS {
        return Err(Error::invalid(format!(
            "quadrature needs at least {MIN_QUADRATURE_POINTS} points, got {n_points}"
        )));
    }
    let degree = NonZeroUsize::new(n_points).expect("checked above");
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(degree)
        .as_node_weight_pairs()
        .iter()
        .map(|&(t, w)| (FRAC_PI_2 * (1.0 + t), FRAC_PI_2 * w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    debug_assert!(pairs.first().is_some_and(|p| p.0 > 0.0));
    debug_assert!(pairs.last().is_some_and(|p| p.0 < PI));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule { nodes, weights })
}

fn check_resolution(rule: &QuadratureRule, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("basis size must be at least 1"));
    }
    if rule.len() < 2 * n {
        return Err(Error::invalid(format!(
            "a {}-point rule cannot resolve mode {n}; need at least {} points",
            rule.len(),
            2 * n
        )));
    }
    Ok(())
}

fn moments_from_samples(backend: Backend, rule: &QuadratureRule, samples: &[f64], n: usize) -> Vec<f64> {
    exec::map_indices(backend, n, |i| {
        let m = (i + 1) as f64;
        rule.nodes.iter().zip(&rule.weights).zip(samples).map(|((&y, &w), &f)| w * (m * y).sin() * f).sum()
    })
}

/// Moments of `f(y)` for modes `1..=n`.
pub fn project_1d(f: impl Fn(f64) -> f64, rule: &QuadratureRule, n: usize) -> Result<MomentVector> {
    project_1d_with(Backend::default(), f, rule, n)
}

pub fn project_1d_with(
    backend: Backend,
    f: impl Fn(f64) -> f64,
    rule: &QuadratureRule,
    n: usize,
) -> Result<MomentVector> {
    check_resolution(rule, n)?;
    let samples = rule.sample(f)?;
    MomentVector::new(moments_from_samples(backend, rule, &samples, n))
}

/// Moments of a forcing given in physical space, `f(x(y))`. Nodes are interior,
/// so `f` is never asked for its value at infinity.
pub fn project_1d_physical(f: impl Fn(f64) -> f64, rule: &QuadratureRule, n: usize) -> Result<MomentVector> {
    project_1d(|y| f(to_physical_interior(y)), rule, n)
}

/// Moments of `fx(y1) fy(y2) fz(y3)`, built from three 1D projections.
pub fn project_3d_separable(
    fx: impl Fn(f64) -> f64,
    fy: impl Fn(f64) -> f64,
    fz: impl Fn(f64) -> f64,
    rule: &QuadratureRule,
    n: usize,
) -> Result<MomentTensor3D> {
    let a = project_1d(fx, rule, n)?;
    let b = project_1d(fy, rule, n)?;
    let c = project_1d(fz, rule, n)?;
    Ok(MomentTensor3D(Tensor3::outer(a.values(), b.values(), c.values())))
}

/// `c_m = (2/pi) f_m`: the coefficients of a function from its own moments.
pub fn moments_to_coefficients(m: &MomentVector) -> SineExpansion1D {
    SineExpansion1D::new(m.values().iter().map(|f| f * 2.0 / PI).collect())
        .expect("moment vectors are nonempty and finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{parity_restrict, Parity};

    fn rule64() -> QuadratureRule {
        build_quadrature(64).unwrap()
    }

    #[test]
    fn rule_basic_identities() {
        let r = rule64();
        assert!((r.weights().iter().sum::<f64>() - PI).abs() < 1e-12);
        assert!((r.integrate(|y| (3.0 * y).sin().powi(2)) - FRAC_PI_2).abs() < 1e-12);
        assert!(r.integrate(|y| (2.0 * y).sin() * (5.0 * y).sin()).abs() < 1e-12);
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(r.nodes()[0] > 0.0 && *r.nodes().last().unwrap() < PI);
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rule_too_small() {
        assert!(matches!(build_quadrature(7), Err(Error::InvalidInput(_))));
        assert!(build_quadrature(8).is_ok());
    }

    #[test]
    fn single_mode_projection() {
        let m = project_1d(|y| (3.0 * y).sin(), &rule64(), 5).unwrap();
        let want = [0.0, 0.0, FRAC_PI_2, 0.0, 0.0];
        for (a, b) in m.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sin7_projection() {
        let m = project_1d(|y| y.sin().powi(7), &rule64(), 8).unwrap();
        let want = [35.0, 0.0, -21.0, 0.0, 7.0, 0.0, -1.0, 0.0].map(|c| FRAC_PI_2 * c / 64.0);
        for (a, b) in m.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        // sin^7 is symmetric about pi/2: restricting to odd modes changes nothing
        let r = parity_restrict(m.clone(), Parity::Symmetric);
        for (a, b) in r.values().iter().zip(m.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_projection() {
        let m = project_1d(|_| 0.0, &rule64(), 4).unwrap();
        assert_eq!(m.values(), &[0.0; 4]);
    }

    #[test]
    fn nonfinite_forcing_reports_node() {
        let r = rule64();
        let bad = r.nodes()[10];
        let err = project_1d(|y| if y == bad { f64::NAN } else { 1.0 }, &r, 4).unwrap_err();
        match err {
            Error::Evaluation { node, .. } => assert_eq!(node, bad),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn underresolved_rule_rejected() {
        let r = build_quadrature(16).unwrap();
        assert!(project_1d(|y| y, &r, 9).is_err());
        assert!(project_1d(|y| y, &r, 8).is_ok());
    }

    #[test]
    fn separable_single_entries() {
        let r = rule64();
        let t = project_3d_separable(|y| y.sin(), |y| y.sin(), |y| y.sin(), &r, 2).unwrap();
        let p3 = FRAC_PI_2.powi(3);
        assert!((t.0[(0, 0, 0)] - p3).abs() < 1e-12);
        assert!(t.0.as_slice()[1..].iter().all(|v| v.abs() < 1e-12));

        let t = project_3d_separable(|y| (2.0 * y).sin(), |y| y.sin(), |y| y.sin(), &r, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let want = if (i, j, k) == (1, 0, 0) { p3 } else { 0.0 };
                    assert!((t.0[(i, j, k)] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coefficient_conversion() {
        let c = moments_to_coefficients(&MomentVector::new(vec![FRAC_PI_2, 0.0]).unwrap());
        assert!((c.coeffs()[0] - 1.0).abs() < 1e-15 && c.coeffs()[1] == 0.0);
        let c = moments_to_coefficients(&MomentVector::new(vec![0.0, PI]).unwrap());
        assert!((c.coeffs()[1] - 2.0).abs() < 1e-15);
        let c = moments_to_coefficients(&MomentVector::zeros(3));
        assert_eq!(c.coeffs(), &[0.0; 3]);
    }

    #[test]
    fn backends_agree_bitwise() {
        let r = build_quadrature(512).unwrap();
        let f = |y: f64| (y * 3.3).cos() * y.sin().powi(3);
        let s = project_1d_with(Backend::Sequential, f, &r, 200).unwrap();
        let p = project_1d_with(Backend::Parallel, f, &r, 200).unwrap();
        assert_eq!(s, p);
    }
}
