//! Data-parallel loops over index ranges (usually subset masks).
//!
//! With the `parallel` feature, [`Strategy::Parallel`] runs on the rayon pool;
//! without it every strategy runs sequentially. Results always come back in
//! index order, so floating-point sums do not depend on the strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

// Below this many items the rayon overhead dominates.
const MIN_PARALLEL_LEN: usize = 256;

impl Strategy {
    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    fn parallel_for(self, len: usize) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel && len >= MIN_PARALLEL_LEN
    }

    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel_for(len) {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Concatenation of `f(i)` for `i` in `0..len`, in index order.
    pub fn flat_map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> Vec<T> + Sync + Send,
    {
        self.map(len, f).into_iter().flatten().collect()
    }

    /// Smallest index satisfying `pred`.
    pub fn find_first<F>(self, len: usize, pred: F) -> Option<usize>
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel_for(len) {
            return (0..len).into_par_iter().find_first(|&i| pred(i));
        }
        (0..len).find(|&i| pred(i))
    }

    pub fn all<F>(self, len: usize, pred: F) -> bool
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        self.find_first(len, |i| !pred(i)).is_none()
    }
}
