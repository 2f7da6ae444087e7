//! # sinemap
//!
//! Spectral-Galerkin solvers for second-order problems on the whole real line
//! (and on `R³` as a tensor product), for solutions that vanish at infinity.
//!
//! The line is mapped onto `(0, π)` by `y = π/2 + atan(x)`, and unknowns are
//! expanded in `sin(m y)`. Because `1/(dx/dy) = sin² y`, the Laplacian's
//! Galerkin matrix is banded with closed-form entries, and the Hartree energy
//! reduces to a contraction with a closed-form overlap matrix.
//!
//! ## Modules
//!
//! | module        | contents                                                     |
//! |---------------|--------------------------------------------------------------|
//! | [`mapping`]   | coordinate map, metric terms, evaluation in physical space   |
//! | [`projection`]| Gauss-Legendre rule on `(0, π)`, forcing moments             |
//! | [`assembly`]  | closed-form and quadrature-assembled Galerkin matrices       |
//! | [`solvers`]   | dense 1D solve, matrix-free Kronecker-sum BiCGSTAB           |
//! | [`hartree`]   | overlap matrix and energy contraction                        |
//! | [`bench`]     | convergence studies and the 3D energy table                  |
//! | [`report`]    | CSV/JSON output                                              |
//! | [`oracle`]    | slow reference routes used by the checks                     |
//!
//! ## Example
//!
//! ```
//! use sinemap::{assembly, projection, solvers};
//!
//! // -u'' + 2u = f with u = (1 + x²)^{-7/2}, which is sin⁷ y after the map.
//! let case = sinemap::bench::BenchCase1D::new(sinemap::bench::CaseKind::Alg, 0.0, 3.5, 2.0).unwrap();
//! let rule = projection::build_quadrature(256).unwrap();
//! let m = assembly::assemble_helmholtz_1d(16, 2.0).unwrap();
//! let f = projection::project_1d_physical(|x| case.forcing(x), &rule, 16).unwrap();
//! let c = solvers::solve_1d(&m, &f).unwrap();
//! assert!((c.coeffs()[0] - 35.0 / 64.0).abs() < 1e-12);
//! ```
//!
//! ## Features
//!
//! `parallel` (default) runs mode loops on the rayon pool. Both backends
//! produce bitwise identical results; see [`exec::Backend`].

pub mod assembly;
pub mod bench;
pub mod error;
pub mod exec;
pub mod expansion;
pub mod hartree;
pub mod mapping;
pub mod oracle;
pub mod projection;
pub mod report;
pub mod selftest;
pub mod solvers;

pub use error::{Error, Result};
pub use exec::Backend;
pub use expansion::{parity_restrict, MomentTensor3D, MomentVector, Parity, SineExpansion1D, SineExpansion3D, Tensor3};
