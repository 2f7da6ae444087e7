//! The arctan map between the real line and `(0, pi)`.
//!
//! `y = pi/2 + atan(x)`, `x = tan(y - pi/2)`. The metric factors are
//! `1/(dx/dy) = sin^2 y` and its `y`-derivative `sin 2y`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::expansion::SineExpansion1D;

/// A point seen from both sides of the map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint {
    pub x: f64,
    pub y: f64,
}

impl MapPoint {
    pub fn from_physical(x: f64) -> Result<Self> {
        Ok(Self { x, y: to_computational(x)? })
    }

    pub fn from_computational(y: f64) -> Result<Self> {
        Ok(Self { x: to_physical(y)?, y })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTerms {
    /// `1/(dx/dy) = sin^2 y`.
    pub inv_jac: f64,
    /// `d/dy (1/(dx/dy)) = sin 2y`.
    pub inv_jac_deriv: f64,
}

pub fn to_computational(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("physical coordinate must be finite, got {x}")));
    }
    Ok(FRAC_PI_2 + x.atan())
}

pub fn to_physical(y: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&y) {
        return Err(Error::invalid(format!("computational coordinate {y} outside [0, pi]")));
    }
    if y == 0.0 {
        return Err(Error::DomainEndpoint { y, infinity: '-' });
    }
    if y == PI {
        return Err(Error::DomainEndpoint { y, infinity: '+' });
    }
    // y - pi/2 is exact here (Sterbenz), so no cancellation near the middle.
    Ok((y - FRAC_PI_2).tan())
}

/// Same as [`to_physical`] for callers that already guarantee `0 < y < pi`.
#[inline]
pub(crate) fn to_physical_interior(y: f64) -> f64 {
    (y - FRAC_PI_2).tan()
}

pub fn metric_terms(y: f64) -> Result<MetricTerms> {
    if !(0.0..=PI).contains(&y) {
        return Err(Error::invalid(format!("computational coordinate {y} outside [0, pi]")));
    }
    // The endpoints are exact zeros, not sin(pi) ~ 1.2e-16.
    if y == 0.0 || y == PI {
        return Ok(MetricTerms { inv_jac: 0.0, inv_jac_deriv: 0.0 });
    }
    let (s, c) = y.sin_cos();
    Ok(MetricTerms { inv_jac: s * s, inv_jac_deriv: 2.0 * s * c })
}

/// `sum_m c_m sin(m (pi/2 + atan x))`.
pub fn eval_expansion_physical(e: &SineExpansion1D, x: f64) -> f64 {
    e.eval_computational(FRAC_PI_2 + x.atan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn forward_examples() {
        assert_eq!(to_computational(0.0).unwrap(), FRAC_PI_2);
        assert!((to_computational(1.0).unwrap() - 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert!((to_computational(-1.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(to_computational(f64::INFINITY).is_err());
        assert!(to_computational(f64::NAN).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(to_physical(FRAC_PI_2).unwrap(), 0.0);
        assert!((to_physical(3.0 * FRAC_PI_4).unwrap() - 1.0).abs() < 1e-15);
        assert!((to_physical(FRAC_PI_4).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_rejects_endpoints_and_outside() {
        assert!(matches!(to_physical(0.0), Err(Error::DomainEndpoint { infinity: '-', .. })));
        assert!(matches!(to_physical(PI), Err(Error::DomainEndpoint { infinity: '+', .. })));
        assert!(matches!(to_physical(-0.1), Err(Error::InvalidInput(_))));
        assert!(matches!(to_physical(4.0), Err(Error::InvalidInput(_))));
        assert!(to_physical(f64::NAN).is_err());
    }

    #[test]
    fn metric_examples() {
        let m = metric_terms(FRAC_PI_2).unwrap();
        assert!((m.inv_jac - 1.0).abs() < 1e-15 && m.inv_jac_deriv.abs() < 1e-15);
        let m = metric_terms(FRAC_PI_4).unwrap();
        assert!((m.inv_jac - 0.5).abs() < 1e-15 && (m.inv_jac_deriv - 1.0).abs() < 1e-15);
        assert_eq!(metric_terms(0.0).unwrap(), MetricTerms { inv_jac: 0.0, inv_jac_deriv: 0.0 });
        assert_eq!(metric_terms(PI).unwrap().inv_jac, 0.0);
        assert!(metric_terms(3.5).is_err());
    }

    #[test]
    fn eval_examples() {
        let e = SineExpansion1D::new(vec![1.0]).unwrap();
        assert!((eval_expansion_physical(&e, 0.0) - 1.0).abs() < 1e-15);
        assert!((eval_expansion_physical(&e, 1.0) - 0.5f64.sqrt()).abs() < 1e-15);
        // sin^7 y = (35 sin y - 21 sin 3y + 7 sin 5y - sin 7y) / 64
        let s7 =
            SineExpansion1D::new([35.0, 0.0, -21.0, 0.0, 7.0, 0.0, -1.0].iter().map(|c| c / 64.0).collect()).unwrap();
        assert!((eval_expansion_physical(&s7, 0.0) - 1.0).abs() < 1e-15);
        for x in [-3.0f64, -0.5, 0.7, 2.0, 10.0] {
            let exact = (1.0 + x * x).powf(-3.5);
            assert!((eval_expansion_physical(&s7, x) - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn map_point_constructors_agree() {
        let p = MapPoint::from_physical(2.5).unwrap();
        let q = MapPoint::from_computational(p.y).unwrap();
        assert!((q.x - 2.5).abs() < 1e-14);
    }
}
