//! Hartree energy from sine coefficients, with the infinite-domain integrals
//! done in closed form.
//!
//! Changing variables in `∫ V ρ d³x` gives the weight `dx = dy / sin² y` per
//! axis, so the energy is a bilinear form with `E ⊗ E ⊗ E`, where
//!
//! ```text
//! [E]_ij = ∫_0^π sin(iy) sin(jy) / sin²(y) dy = π min(i, j)   if i + j even
//!                                              = 0             otherwise
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::{self, Backend};
use crate::expansion::{MomentTensor3D, SineExpansion3D, Tensor3};

/// Dense symmetric `E`, with per-row nonzero columns cached.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    n: usize,
    data: Vec<f64>,
    /// Row `i` is nonzero exactly on columns of the same parity.
    row_cols: Vec<Vec<usize>>,
}

impl OverlapMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Zero-based indices; `get(i, j)` is `[E]_{i+1, j+1}`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// One-based closed form.
pub fn overlap_entry(i: usize, j: usize) -> f64 {
    if (i + j).is_multiple_of(2) {
        PI * i.min(j) as f64
    } else {
        0.0
    }
}

pub fn build_overlap_matrix(n: usize) -> Result<OverlapMatrix> {
    if n == 0 {
        return Err(Error::invalid("basis size must be at least 1"));
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = overlap_entry(i + 1, j + 1);
        }
    }
    let row_cols = (0..n).map(|i| (i % 2..n).step_by(2).collect()).collect();
    Ok(OverlapMatrix { n, data, row_cols })
}

/// Applies `E` along one tensor axis.
pub fn overlap_mode_product(backend: Backend, e: &OverlapMatrix, t: &Tensor3, axis: usize) -> Tensor3 {
    let n = t.side();
    assert_eq!(e.n, n, "overlap/tensor size mismatch");
    assert!(axis < 3, "axis must be 0, 1 or 2");
    let nn = n * n;
    let src = t.as_slice();
    let mut out = Tensor3::zeros(n);
    exec::for_each_chunk_mut(backend, out.as_mut_slice(), nn, |l, slab| {
        for j in 0..n {
            for k in 0..n {
                let (row, stride, base) = match axis {
                    0 => (l, nn, j * n + k),
                    1 => (j, n, l * nn + k),
                    _ => (k, 1, l * nn + j * n),
                };
                let mut acc = 0.0;
                for &p in &e.row_cols[row] {
                    acc += e.data[row * n + p] * src[base + p * stride];
                }
                slab[j * n + k] = acc;
            }
        }
    });
    out
}

/// `(E ⊗ E ⊗ E) t`, contracting axes in the given order.
pub fn apply_overlap_3d(backend: Backend, e: &OverlapMatrix, t: &Tensor3, order: [usize; 3]) -> Tensor3 {
    let mut acc = overlap_mode_product(backend, e, t, order[0]);
    acc = overlap_mode_product(backend, e, &acc, order[1]);
    overlap_mode_product(backend, e, &acc, order[2])
}

/// `kappa · cᵀ (E ⊗ E ⊗ E) f` in `O(N⁴)`.
///
/// `kappa` carries the normalisation: with `c` the sine coefficients of `V`
/// and `f` the raw moments of `ρ`, `kappa = (2/π)³` gives `∫ V ρ d³x`.
pub fn hartree_energy(c: &SineExpansion3D, f: &MomentTensor3D, kappa: f64) -> Result<f64> {
    hartree_energy_with(Backend::default(), c, f, kappa)
}

pub fn hartree_energy_with(backend: Backend, c: &SineExpansion3D, f: &MomentTensor3D, kappa: f64) -> Result<f64> {
    if c.side() != f.side() {
        return Err(Error::DimensionMismatch { expected: c.side(), found: f.side() });
    }
    if !kappa.is_finite() {
        return Err(Error::invalid(format!("scale must be finite, got {kappa}")));
    }
    let e = build_overlap_matrix(c.side())?;
    let ef = apply_overlap_3d(backend, &e, f.tensor(), [0, 1, 2]);
    Ok(kappa * exec::dot(backend, c.0.as_slice(), ef.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_examples() {
        let e = build_overlap_matrix(4).unwrap();
        assert_eq!(e.get(0, 0), PI);
        assert_eq!(e.get(0, 1), 0.0);
        assert_eq!(e.get(0, 2), PI);
        assert_eq!(e.get(1, 1), 2.0 * PI);
        for i in 0..4 {
            assert_eq!(e.get(i, i), PI * (i + 1) as f64);
            for j in 0..4 {
                assert_eq!(e.get(i, j), e.get(j, i));
            }
        }
        assert!(build_overlap_matrix(0).is_err());
    }

    #[test]
    fn unit_mode_energy() {
        let mut t = Tensor3::zeros(3);
        t[(0, 0, 0)] = 1.0;
        let e = hartree_energy(&SineExpansion3D(t.clone()), &MomentTensor3D(t), 1.0).unwrap();
        assert!((e - PI.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch() {
        let c = SineExpansion3D(Tensor3::zeros(2));
        let f = MomentTensor3D(Tensor3::zeros(3));
        assert!(matches!(hartree_energy(&c, &f, 1.0), Err(Error::DimensionMismatch { .. })));
    }
}
