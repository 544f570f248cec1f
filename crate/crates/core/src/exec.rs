//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Strategy::Parallel`] runs on the
//! rayon pool; without it every strategy runs sequentially. Results are
//! always collected in input order, so both strategies return identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(strategy: Strategy, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = strategy;
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map<T, R, F>(strategy: Strategy, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

/// Lowest index in `0..n` for which `f` returns `Some`, with its payload.
pub fn find_first<R, F>(strategy: Strategy, n: usize, f: F) -> Option<(usize, R)>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return (0..n)
            .into_par_iter()
            .find_map_first(|i| f(i).map(|r| (i, r)));
    }
    let _ = strategy;
    (0..n).find_map(|i| f(i).map(|r| (i, r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let seq = map_range(Strategy::Sequential, 1000, |i| i * i % 97);
        let par = map_range(Strategy::Parallel, 1000, |i| i * i % 97);
        assert_eq!(seq, par);
        let pick = |i: usize| (i % 37 == 36).then_some(i * 2);
        assert_eq!(
            find_first(Strategy::Sequential, 500, pick),
            find_first(Strategy::Parallel, 500, pick)
        );
        assert_eq!(find_first(Strategy::Parallel, 500, pick), Some((36, 72)));
    }
}
