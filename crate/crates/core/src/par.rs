//! Data-parallel helpers. With the `parallel` feature (default) these run on
//! the current rayon pool; without it they are plain sequential loops. Both
//! paths visit the same indices and write the same slots, so results are
//! identical for any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`, possibly in parallel, order preserved.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Calls `f(y, row)` for each `width`-long row of `data`.
pub fn for_each_row_mut<T, F>(data: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    if width == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(width).enumerate().for_each(|(y, row)| f(y, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(width).enumerate().for_each(|(y, row)| f(y, row));
    }
}

/// Sums `f(y)` over rows, possibly in parallel. Partial sums are combined in
/// a fixed per-row order so the result does not depend on scheduling.
pub fn sum_rows<F>(height: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map_indexed(height, f).into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_visited_once() {
        let mut data = vec![0u32; 12];
        for_each_row_mut(&mut data, 4, |y, row| {
            for (x, v) in row.iter_mut().enumerate() {
                *v += (y * 10 + x) as u32;
            }
        });
        assert_eq!(data, vec![0, 1, 2, 3, 10, 11, 12, 13, 20, 21, 22, 23]);
        assert_eq!(map_indexed(5, |i| i * i), vec![0, 1, 4, 9, 16]);
        assert_eq!(sum_rows(4, |y| y as f64), 6.0);
    }
}
