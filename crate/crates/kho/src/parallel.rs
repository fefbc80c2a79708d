//! Data-parallel helpers with a sequential fallback.
//!
//! Hot loops (trajectory ensembles, grid nodes, sweep points) run on the
//! rayon pool when the `parallel` feature is enabled and fall back to plain
//! iteration otherwise. Results are always assembled by index, and scalar
//! reductions are performed sequentially over the collected values, so
//! outputs are bit-identical across thread counts and between the two
//! build modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..n` and collects results in index order.
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Applies `f` to fixed-size chunks of `data`; chunk boundaries depend only
/// on `size`, never on the thread count.
pub(crate) fn for_chunks_mut<T, F>(data: &mut [T], size: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(size)
            .enumerate()
            .for_each(|(i, chunk)| f(i, chunk));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(size)
            .enumerate()
            .for_each(|(i, chunk)| f(i, chunk));
    }
}

/// Like [`for_chunks_mut`] but collects one result per chunk, in chunk
/// order, so sequential reductions over the results are deterministic.
pub(crate) fn map_chunks_mut<T, U, F>(data: &mut [T], size: usize, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(usize, &mut [T]) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(size)
            .enumerate()
            .map(|(i, chunk)| f(i, chunk))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(size)
            .enumerate()
            .map(|(i, chunk)| f(i, chunk))
            .collect()
    }
}
