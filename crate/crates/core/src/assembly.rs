//! 1D Galerkin matrices `[M]_{mn} = int_0^pi sin(m y) L[sin(n y)] dy`.
//!
//! For `L = L2 d²/dx² + L1 d/dx + L0` mapped to `(0, pi)` the matrix splits as
//! `M2 + M12 + M1 + M0`:
//!
//! ```text
//! [M2]_mn  = -n² ∫ sin(my) L2 sin⁴(y)          sin(ny) dy
//! [M12]_mn =  n  ∫ sin(my) L2 sin²(y) sin(2y)  cos(ny) dy
//! [M1]_mn  =  n  ∫ sin(my) L1 sin²(y)          cos(ny) dy
//! [M0]_mn  =     ∫ sin(my) L0                  sin(ny) dy
//! ```
//!
//! With constant `L2` the first two have closed forms supported on
//! `|m - n| ∈ {0, 2, 4}` and `m + n ∈ {2, 4}`; those are the source of truth
//! for the Poisson and screened-Poisson operators. The quadrature path serves
//! arbitrary coefficients and cross-checks the closed forms.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::exec::{self, Backend};
use crate::projection::QuadratureRule;

/// Square sparse matrix in compressed-row form. Rows are mode-ordered and
/// columns sorted within a row, so [`entries`](Self::entries) is row-major.
/// Row/column `i` corresponds to basis mode `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinMatrix1D {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl GalerkinMatrix1D {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        if let Some(&(r, c, _)) = t.iter().find(|(r, c, _)| *r >= n || *c >= n) {
            return Err(Error::invalid(format!("entry ({r}, {c}) outside a {n}x{n} matrix")));
        }
        if let Some(&(r, c, v)) = t.iter().find(|(_, _, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("entry ({r}, {c}) is {v}")));
        }
        t.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().expect("duplicate follows an entry") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut m = Self { n, row_ptr, cols, vals };
        m.drop_zeros();
        Ok(m)
    }

    /// Row-major dense input of length `n * n`.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: dense.len() });
        }
        Self::from_triplets(n, (0..n * n).map(|k| (k / n, k % n, dense[k])))
    }

    pub fn identity(n: usize, scale: f64) -> Result<Self> {
        Self::from_triplets(n, (0..n).map(|i| (i, i, scale)))
    }

    fn drop_zeros(&mut self) {
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k] != 0.0 {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_nnz(&self, row: usize) -> usize {
        self.row_ptr[row + 1] - self.row_ptr[row]
    }

    /// `(col, value)` pairs of one row.
    #[inline]
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    #[inline]
    pub(crate) fn row_slices(&self, row: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }

    /// Stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.row(row).find(|&(c, _)| c == col).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for (r, c, v) in self.entries() {
            d[r * self.n + c] = v;
        }
        d
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= s);
        m.drop_zeros();
        m
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Self::from_triplets(self.n, self.entries().chain(other.entries().map(|(r, c, v)| (r, c, s * v))))
    }

    /// Submatrix on the given zero-based indices, in the order given.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            if old >= self.n {
                return Err(Error::invalid(format!("index {old} outside dimension {}", self.n)));
            }
            pos[old] = new;
        }
        let t = keep.iter().enumerate().flat_map(|(new_r, &old_r)| {
            let pos = &pos;
            self.row(old_r).filter(move |&(c, _)| pos[c] != usize::MAX).map(move |(c, v)| (new_r, pos[c], v))
        });
        Self::from_triplets(keep.len(), t.collect::<Vec<_>>())
    }

    /// Largest entrywise difference, treating missing entries as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.to_dense().iter().zip(other.to_dense()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

#[inline]
fn delta(a: i64, b: i64) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Closed-form `[M2]_mn` for `L2 = 1`, one-based modes.
pub fn m2_entry(m: usize, n: usize) -> f64 {
    let (m, n) = (m as i64, n as i64);
    let bracket = delta(m - n, 4) + delta(n - m, 4) - delta(m + n, 4) - 4.0 * delta(m - n, 2) - 4.0 * delta(n - m, 2)
        + 4.0 * delta(m + n, 2)
        + 6.0 * delta(m, n);
    -((n * n) as f64) * PI / 32.0 * bracket
}

/// Closed-form `[M12]_mn` for `L2 = 1`, one-based modes.
pub fn m12_entry(m: usize, n: usize) -> f64 {
    let (m, n) = (m as i64, n as i64);
    let bracket = -delta(m - n, 4) + delta(n - m, 4) - delta(m + n, 4) + 2.0 * delta(m - n, 2) - 2.0 * delta(n - m, 2)
        + 2.0 * delta(m + n, 2);
    (n as f64) * PI / 16.0 * bracket
}

/// Columns that can be nonzero in row `m` (one-based) of the closed forms.
fn band_columns(m: usize, n: usize) -> impl Iterator<Item = usize> {
    let m = m as i64;
    let mut cols: Vec<i64> = vec![m - 4, m - 2, m, m + 2, m + 4, 2 - m, 4 - m];
    cols.retain(|&c| c >= 1 && c <= n as i64);
    cols.sort_unstable();
    cols.dedup();
    cols.into_iter().map(|c| c as usize)
}

fn closed_form(n: usize, entry: impl Fn(usize, usize) -> f64) -> Result<GalerkinMatrix1D> {
    if n == 0 {
        return Err(Error::invalid("basis size must be at least 1"));
    }
    let t = (1..=n).flat_map(|m| band_columns(m, n).map(move |c| (m - 1, c - 1, (m, c))));
    GalerkinMatrix1D::from_triplets(n, t.map(|(r, c, (m, k))| (r, c, entry(m, k))).collect::<Vec<_>>())
}

pub fn assemble_m2(n: usize) -> Result<GalerkinMatrix1D> {
    closed_form(n, m2_entry)
}

pub fn assemble_m12(n: usize) -> Result<GalerkinMatrix1D> {
    closed_form(n, m12_entry)
}

/// `M2 + M12` for `d²u/dx² = f`.
pub fn assemble_poisson_1d(n: usize) -> Result<GalerkinMatrix1D> {
    closed_form(n, |m, k| m2_entry(m, k) + m12_entry(m, k))
}

/// `-(M2 + M12) + gamma (pi/2) I` for `-d²u/dx² + gamma u = f`.
pub fn assemble_helmholtz_1d(n: usize, gamma: f64) -> Result<GalerkinMatrix1D> {
    if !gamma.is_finite() {
        return Err(Error::invalid(format!("screening constant must be finite, got {gamma}")));
    }
    closed_form(n, |m, k| {
        let mass = if m == k { gamma * FRAC_PI_2 } else { 0.0 };
        -(m2_entry(m, k) + m12_entry(m, k)) + mass
    })
}

type CoefFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Coefficients of `L2 u'' + L1 u' + L0 u`, given as functions of the
/// computational coordinate `y`.
pub struct OperatorSpec {
    pub l2: CoefFn,
    pub l1: CoefFn,
    pub l0: CoefFn,
}

impl OperatorSpec {
    pub fn new(
        l2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        l1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        l0: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { l2: Box::new(l2), l1: Box::new(l1), l0: Box::new(l0) }
    }

    pub fn constant(l2: f64, l1: f64, l0: f64) -> Self {
        Self::new(move |_| l2, move |_| l1, move |_| l0)
    }

    /// `-u'' + gamma u`.
    pub fn screened(gamma: f64) -> Self {
        Self::constant(-1.0, 0.0, gamma)
    }
}

impl std::fmt::Debug for OperatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorSpec").finish_non_exhaustive()
    }
}

fn sample(rule: &QuadratureRule, f: &CoefFn) -> Result<Vec<f64>> {
    rule.nodes()
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

/// Every entry of `M2 + M12 + M1 + M0` by quadrature.
pub fn assemble_general_1d(spec: &OperatorSpec, n: usize, rule: &QuadratureRule) -> Result<GalerkinMatrix1D> {
    assemble_general_1d_with(Backend::default(), spec, n, rule)
}

pub fn assemble_general_1d_with(
    backend: Backend,
    spec: &OperatorSpec,
    n: usize,
    rule: &QuadratureRule,
) -> Result<GalerkinMatrix1D> {
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
    let l2 = sample(rule, &spec.l2)?;
    let l1 = sample(rule, &spec.l1)?;
    let l0 = sample(rule, &spec.l0)?;
    let nodes = rule.nodes();
    let q = nodes.len();

    // Per node: weights folded into the operator factors acting on sin(ny)
    // and cos(ny).
    let mut a_sin2 = vec![0.0; q]; // multiplies -n² sin(ny)
    let mut a_cos = vec![0.0; q]; // multiplies n cos(ny)
    let mut a_sin0 = vec![0.0; q]; // multiplies sin(ny)
    for i in 0..q {
        let (s, c) = nodes[i].sin_cos();
        let s2 = s * s;
        let w = rule.weights()[i];
        a_sin2[i] = w * l2[i] * s2 * s2;
        a_cos[i] = w * (l2[i] * s2 * 2.0 * s * c + l1[i] * s2);
        a_sin0[i] = w * l0[i];
    }
    let sin_tab: Vec<Vec<f64>> = (1..=n).map(|m| nodes.iter().map(|y| (m as f64 * y).sin()).collect()).collect();
    let cos_tab: Vec<Vec<f64>> = (1..=n).map(|m| nodes.iter().map(|y| (m as f64 * y).cos()).collect()).collect();

    let rows = exec::map_indices(backend, n, |r| {
        let sm = &sin_tab[r];
        (0..n)
            .map(|c| {
                let k = (c + 1) as f64;
                let (sk, ck) = (&sin_tab[c], &cos_tab[c]);
                let mut acc = 0.0;
                for i in 0..q {
                    acc += sm[i] * ((a_sin0[i] - k * k * a_sin2[i]) * sk[i] + k * a_cos[i] * ck[i]);
                }
                acc
            })
            .collect::<Vec<f64>>()
    });
    GalerkinMatrix1D::from_dense(n, &rows.concat())
}
