//! Slow reference routes used to check the fast paths: explicit Kronecker
//! matrices, Gaussian elimination, brute-force quadrature of the defining
//! integrals, finite differences. None of this shares code with the
//! production solvers beyond the quadrature rule and the matrix container.

use crate::assembly::GalerkinMatrix1D;
use crate::expansion::Tensor3;
use crate::projection::QuadratureRule;

/// Row-major Kronecker product of an `na x na` and an `nb x nb` matrix.
pub fn kron(a: &[f64], na: usize, b: &[f64], nb: usize) -> Vec<f64> {
    let n = na * nb;
    let mut out = vec![0.0; n * n];
    for i1 in 0..na {
        for j1 in 0..na {
            let av = a[i1 * na + j1];
            if av == 0.0 {
                continue;
            }
            for i2 in 0..nb {
                for j2 in 0..nb {
                    out[(i1 * nb + i2) * n + (j1 * nb + j2)] = av * b[i2 * nb + j2];
                }
            }
        }
    }
    out
}

fn identity(n: usize) -> Vec<f64> {
    let mut id = vec![0.0; n * n];
    for i in 0..n {
        id[i * n + i] = 1.0;
    }
    id
}

/// Explicit `I⊗I⊗M + I⊗M⊗I + M⊗I⊗I`, size `N³ x N³`.
pub fn dense_kronecker_sum(m: &GalerkinMatrix1D) -> Vec<f64> {
    let n = m.dim();
    let a = m.to_dense();
    let id = identity(n);
    let t1 = kron(&id, n, &kron(&id, n, &a, n), n * n);
    let t2 = kron(&id, n, &kron(&a, n, &id, n), n * n);
    let t3 = kron(&a, n, &kron(&id, n, &id, n), n * n);
    t1.iter().zip(&t2).zip(&t3).map(|((x, y), z)| x + y + z).collect()
}

/// Explicit `E ⊗ E ⊗ E` from a dense `n x n` matrix.
pub fn dense_kron3(e: &[f64], n: usize) -> Vec<f64> {
    kron(e, n, &kron(e, n, e, n), n * n)
}

pub fn dense_matvec(a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| a[i * n..(i + 1) * n].iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

/// Gaussian elimination with partial pivoting. `None` if a pivot vanishes.
pub fn dense_solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let factor = m[r * n + col] / m[col * n + col];
            if factor != 0.0 {
                for k in col..n {
                    m[r * n + k] -= factor * m[col * n + k];
                }
                x[r] -= factor * x[col];
            }
        }
    }
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r * n + k] * x[k]).sum();
        x[r] = (x[r] - s) / m[r * n + r];
    }
    Some(x)
}

/// `[M2]_mn = -n² ∫ sin(my) sin⁴(y) sin(ny) dy`, one-based modes.
pub fn quadrature_m2(rule: &QuadratureRule, m: usize, n: usize) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    -nf * nf * rule.integrate(|y| (mf * y).sin() * y.sin().powi(4) * (nf * y).sin())
}

/// `[M12]_mn = n ∫ sin(my) sin²(y) sin(2y) cos(ny) dy`, one-based modes.
pub fn quadrature_m12(rule: &QuadratureRule, m: usize, n: usize) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    nf * rule.integrate(|y| (mf * y).sin() * y.sin().powi(2) * (2.0 * y).sin() * (nf * y).cos())
}

/// `∫ sin(iy) sin(jy) / sin²(y) dy`. The integrand is analytic on `[0, π]`
/// (each ratio `sin(ky)/sin(y)` is a polynomial in `cos y`) and the nodes are
/// interior, so no endpoint treatment is needed.
pub fn quadrature_overlap(rule: &QuadratureRule, i: usize, j: usize) -> f64 {
    let (fi, fj) = (i as f64, j as f64);
    rule.integrate(|y| {
        let s = y.sin();
        ((fi * y).sin() / s) * ((fj * y).sin() / s)
    })
}

/// Full tensor-product quadrature of `∫∫∫ sin(l y1) sin(m y2) sin(n y3) f dy`.
pub fn tensor_quadrature_3d(rule: &QuadratureRule, f: impl Fn(f64, f64, f64) -> f64, n: usize) -> Tensor3 {
    let nodes = rule.nodes();
    let w = rule.weights();
    let q = nodes.len();
    let sines: Vec<Vec<f64>> = (1..=n).map(|k| nodes.iter().map(|y| (k as f64 * y).sin()).collect()).collect();
    let mut out = Tensor3::zeros(n);
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let v = w[a] * w[b] * w[c] * f(nodes[a], nodes[b], nodes[c]);
                for l in 0..n {
                    let vl = v * sines[l][a];
                    for m in 0..n {
                        let vlm = vl * sines[m][b];
                        for k in 0..n {
                            out[(l, m, k)] += vlm * sines[k][c];
                        }
                    }
                }
            }
        }
    }
    out
}

/// `cᵀ (E⊗E⊗E) f` with the Kronecker product formed explicitly.
pub fn dense_bilinear(c: &Tensor3, k3: &[f64], f: &Tensor3) -> f64 {
    let kf = dense_matvec(k3, f.as_slice());
    c.as_slice().iter().zip(&kf).map(|(a, b)| a * b).sum()
}

/// Five-point central estimate of `u''(x)`.
pub fn second_derivative(u: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-u(x + 2.0 * h) + 16.0 * u(x + h) - 30.0 * u(x) + 16.0 * u(x - h) - u(x - 2.0 * h)) / (12.0 * h * h)
}
