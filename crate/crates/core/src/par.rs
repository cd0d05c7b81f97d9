//! Row-wise loops that run on rayon with the `parallel` feature and
//! sequentially without it. Every helper keeps per-row work independent so
//! the result never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(state, row_index, row)` for every `row_len`-sized chunk of
/// `data`. `init` builds per-worker scratch state.
pub(crate) fn for_each_row_init<T, S, I, F>(data: &mut [T], row_len: usize, init: I, f: F)
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, &mut [T]) + Sync + Send,
{
    if row_len == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(row_len)
        .enumerate()
        .for_each_init(init, |state, (i, row)| f(state, i, row));
    #[cfg(not(feature = "parallel"))]
    {
        let mut state = init();
        for (i, row) in data.chunks_mut(row_len).enumerate() {
            f(&mut state, i, row);
        }
    }
}

pub(crate) fn for_each_row<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    for_each_row_init(data, row_len, || (), |_, i, row| f(i, row));
}

/// Maps `0..n` to a vector, preserving index order.
pub(crate) fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
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
