//! Data-parallel execution of independent trials.
//!
//! With the `parallel` feature (on by default) work is spread over the rayon
//! pool; without it everything runs on the calling thread. Both strategies
//! return results in index order, so downstream reductions see identical
//! inputs either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        }
    }

    /// Splits `0..n` into `parts` contiguous ranges, folds each range with
    /// `f` and combines the partial sums pairwise. The result depends only on
    /// `n` and `parts`, not on the execution strategy.
    pub fn chunked_sum<F>(self, n: usize, parts: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let parts = parts.clamp(1, n.max(1));
        let ranges: Vec<(usize, usize)> = (0..parts)
            .map(|p| (p * n / parts, (p + 1) * n / parts))
            .collect();
        let partial = self.map(parts, |p| {
            let (lo, hi) = ranges[p];
            let vals: Vec<f64> = (lo..hi).map(&f).collect();
            pairwise_sum(&vals)
        });
        pairwise_sum(&partial)
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => {
            let (a, b) = v.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let v = Exec::default().map(100, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }

    #[test]
    fn chunked_sum_matches_across_strategies() {
        let f = |i: usize| 1.0 / (1.0 + i as f64);
        let a = Exec::Sequential.chunked_sum(1000, 7, f);
        let b = Exec::default().chunked_sum(1000, 7, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn pairwise_sum_small_and_empty() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
    }
}
