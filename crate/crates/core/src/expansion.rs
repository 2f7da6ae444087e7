//! Coefficient and moment containers for the sine basis.
//!
//! Storage is zero-based: slot `i` holds basis mode `i + 1`, i.e. the factor
//! of `sin((i + 1) y)`. 3D tensors are row-major with the first mode index
//! slowest.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Which half of the sine modes survives a symmetry about `y = pi/2`.
///
/// Under `y -> pi - y` (equivalently `x -> -x`) the basis function
/// `sin(m y)` picks up a factor `(-1)^(m+1)`. A function even in `x` therefore
/// uses only odd `m`, and a function odd in `x` only even `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `f(pi - y) = f(y)`, i.e. `u(x)` even. Keeps odd modes.
    Symmetric,
    /// `f(pi - y) = -f(y)`, i.e. `u(x)` odd. Keeps even modes.
    Antisymmetric,
}

impl Parity {
    /// Whether the one-based `mode` is allowed under this symmetry.
    pub fn keeps(self, mode: usize) -> bool {
        match self {
            Parity::Symmetric => !mode.is_multiple_of(2),
            Parity::Antisymmetric => mode.is_multiple_of(2),
        }
    }

    /// One-based modes in `1..=n` that survive.
    pub fn kept_modes(self, n: usize) -> Vec<usize> {
        (1..=n).filter(|&m| self.keeps(m)).collect()
    }
}

/// Anything indexed by sine mode.
pub trait ModeVector {
    fn modes(&self) -> &[f64];
    fn modes_mut(&mut self) -> &mut [f64];
}

/// Zero every entry the symmetry forbids.
pub fn parity_restrict<T: ModeVector>(mut v: T, parity: Parity) -> T {
    for (i, x) in v.modes_mut().iter_mut().enumerate() {
        if !parity.keeps(i + 1) {
            *x = 0.0;
        }
    }
    v
}

fn check_vector(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid(format!("{what} must have at least one mode")));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{what} entry for mode {} is {}", i + 1, values[i])));
    }
    Ok(())
}

/// Truncated sine series `sum_m c_m sin(m y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineExpansion1D {
    coeffs: Vec<f64>,
}

impl SineExpansion1D {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        check_vector(&coeffs, "expansion")?;
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "expansion needs at least one mode");
        Self { coeffs: vec![0.0; n] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    /// Value at a computational coordinate.
    pub fn eval_computational(&self, y: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(i, c)| c * ((i + 1) as f64 * y).sin()).sum()
    }
}

impl ModeVector for SineExpansion1D {
    fn modes(&self) -> &[f64] {
        &self.coeffs
    }
    fn modes_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }
}

/// Raw projections `f_m = int_0^pi sin(m y) f(y) dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    values: Vec<f64>,
}

impl MomentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_vector(&values, "moment vector")?;
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "moment vector needs at least one mode");
        Self { values: vec![0.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl ModeVector for MomentVector {
    fn modes(&self) -> &[f64] {
        &self.values
    }
    fn modes_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Dense cubic `n x n x n` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n * n {
            return Err(Error::DimensionMismatch { expected: n * n * n, found: data.len() });
        }
        if n == 0 {
            return Err(Error::invalid("tensor side must be at least 1"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("tensor entries must be finite"));
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    /// `a ⊗ b ⊗ c` for three equal-length vectors.
    pub fn outer(a: &[f64], b: &[f64], c: &[f64]) -> Self {
        assert!(a.len() == b.len() && b.len() == c.len());
        Self::from_fn(a.len(), |i, j, k| a[i] * b[j] * c[k])
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.data.iter_mut().for_each(|v| *v *= s);
        self
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &Tensor3) {
        assert_eq!(self.n, other.n);
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += s * b);
    }

    /// Reorders axes: result axis `a` is input axis `perm[a]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let mut sorted = perm;
        sorted.sort_unstable();
        assert_eq!(sorted, [0, 1, 2], "not a permutation");
        Self::from_fn(self.n, |i, j, k| {
            let out = [i, j, k];
            let mut src = [0; 3];
            for a in 0..3 {
                src[perm[a]] = out[a];
            }
            self[(src[0], src[1], src[2])]
        })
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[self.offset(i, j, k)]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        let o = self.offset(i, j, k);
        &mut self.data[o]
    }
}

/// Coefficients `c_lmn` of `sum c_lmn sin(l y1) sin(m y2) sin(n y3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineExpansion3D(pub Tensor3);

/// Raw 3D moments `f_lmn`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTensor3D(pub Tensor3);

impl SineExpansion3D {
    pub fn side(&self) -> usize {
        self.0.side()
    }
    pub fn tensor(&self) -> &Tensor3 {
        &self.0
    }
}

impl MomentTensor3D {
    pub fn side(&self) -> usize {
        self.0.side()
    }
    pub fn tensor(&self) -> &Tensor3 {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_keep_odd_and_even() {
        let v = MomentVector::new(vec![1.0; 4]).unwrap();
        assert_eq!(parity_restrict(v.clone(), Parity::Symmetric).values(), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(parity_restrict(v, Parity::Antisymmetric).values(), &[0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(SineExpansion1D::new(vec![]).is_err());
        assert!(MomentVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Tensor3::from_vec(2, vec![0.0; 7]).is_err());
    }

    #[test]
    fn permutation_round_trip() {
        let t = Tensor3::from_fn(3, |i, j, k| (i * 100 + j * 10 + k) as f64);
        let p = t.permuted([2, 0, 1]);
        // result axis 0 is input axis 2
        assert_eq!(p[(1, 0, 0)], t[(0, 0, 1)]);
        assert_eq!(p.permuted([1, 2, 0]), t);
    }
}
