//! Path-level parallelism with a sequential fallback.
//!
//! With the `parallel` feature, [`Exec::Parallel`] maps paths on the rayon
//! pool; otherwise, and for [`Exec::Sequential`], a plain iterator is used.
//! Results always come back in path order so reductions are reproducible.

/// How to run a batch of independent paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

/// Evaluates `f(i)` for `i in 0..n`, returning results in index order.
pub fn map_paths<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let a = map_paths(Exec::Parallel, 100, |i| (i as f64).sqrt());
        let b = map_paths(Exec::Sequential, 100, |i| (i as f64).sqrt());
        assert_eq!(a, b);
    }
}
