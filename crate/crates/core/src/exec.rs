//! Data-parallel helpers with a sequential fallback.
//!
//! Every reduction in this crate is written as "map an index range to
//! per-chunk partials, then fold the partials in index order", so results
//! are identical whether the `parallel` feature is on, and independent of
//! the rayon thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Split `len` items into chunks of at most `chunk` and fold the per-chunk
/// results of `f(start..end)` in chunk order.
pub(crate) fn chunked_fold<T, F, G>(len: usize, chunk: usize, f: F, init: T, mut fold: G) -> T
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
    G: FnMut(T, T) -> T,
{
    if len == 0 {
        return init;
    }
    let chunk = chunk.max(1);
    let blocks = len.div_ceil(chunk);
    let partials = map_collect(blocks, |b| {
        let lo = b * chunk;
        let hi = (lo + chunk).min(len);
        f(lo..hi)
    });
    partials.into_iter().fold(init, &mut fold)
}
