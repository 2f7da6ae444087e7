//! Execution backend for the data-parallel loops.
//!
//! Every hot loop in the crate (mode slices of the Kronecker-sum action,
//! per-mode projection integrals, overlap contractions, N-sweeps) goes through
//! the helpers here. Each output element is produced by one closure call with a
//! fixed, sequential summation order, so both backends give bitwise identical
//! results. Without the `parallel` feature, [`Backend::Parallel`] silently runs
//! sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for reductions. Fixed so partial sums do not depend on the
/// thread count.
const REDUCE_CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Sequential,
    Parallel,
}

impl Default for Backend {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Backend::Parallel
        } else {
            Backend::Sequential
        }
    }
}

impl Backend {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Backend::Parallel
    }
}

/// Calls `f(chunk_index, chunk)` for each `chunk_len`-sized piece of `data`.
pub(crate) fn for_each_chunk_mut<F>(backend: Backend, data: &mut [f64], chunk_len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Send + Sync,
{
    debug_assert!(chunk_len > 0);
    #[cfg(feature = "parallel")]
    if backend.is_parallel() {
        data.par_chunks_mut(chunk_len).enumerate().for_each(|(i, chunk)| f(i, chunk));
        return;
    }
    let _ = backend;
    data.chunks_mut(chunk_len).enumerate().for_each(|(i, chunk)| f(i, chunk));
}

/// `(0..len).map(f).collect()`, in index order on either backend.
pub(crate) fn map_indices<T, F>(backend: Backend, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    if backend.is_parallel() {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = backend;
    (0..len).map(f).collect()
}

/// Deterministic dot product: fixed-size chunk partials summed in order.
pub(crate) fn dot(backend: Backend, a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let partial = |(x, y): (&[f64], &[f64])| -> f64 { x.iter().zip(y).map(|(p, q)| p * q).sum() };
    #[cfg(feature = "parallel")]
    if backend.is_parallel() && a.len() > REDUCE_CHUNK {
        let partials: Vec<f64> = a.par_chunks(REDUCE_CHUNK).zip(b.par_chunks(REDUCE_CHUNK)).map(partial).collect();
        return partials.iter().sum();
    }
    let _ = backend;
    a.chunks(REDUCE_CHUNK).zip(b.chunks(REDUCE_CHUNK)).map(partial).collect::<Vec<_>>().iter().sum()
}

pub(crate) fn norm2(backend: Backend, a: &[f64]) -> f64 {
    dot(backend, a, a).sqrt()
}
