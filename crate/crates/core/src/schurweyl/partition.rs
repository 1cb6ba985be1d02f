use crate::error::{QcError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Integer partition with strictly positive, non-increasing parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Builds a partition, dropping trailing zeros.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(QcError::InvalidParameter(format!("{parts:?} is not a partition")));
        }
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of rows, written ℓ(λ).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.0.first().copied().unwrap_or(0);
        Partition((0..cols).map(|j| self.0.iter().filter(|&&r| r > j).count()).collect())
    }

    fn hooks(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.size());
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row {
                out.push((row - j - 1) + (conj.0[j] - i - 1) + 1);
            }
        }
        out
    }

    /// Dimension of the Specht module, by the hook length formula.
    pub fn dim_specht(&self) -> u64 {
        let num: u128 = (1..=self.size() as u128).product();
        let den: u128 = self.hooks().iter().map(|&h| h as u128).product();
        (num / den) as u64
    }

    /// Dimension of the `GL(r)` irrep, i.e. the number of semistandard
    /// tableaux of this shape with entries in `1..=r`. Zero when `ℓ(λ) > r`.
    pub fn dim_gl(&self, r: usize) -> u128 {
        if self.len() > r {
            return 0;
        }
        let mut num: u128 = 1;
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row {
                num *= (r + j - i) as u128;
            }
        }
        let den: u128 = self.hooks().iter().map(|&h| h as u128).product();
        num / den
    }

    /// Sum of box contents `Σ (j - i)`.
    pub fn content_sum(&self) -> i64 {
        let mut s = 0i64;
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row {
                s += j as i64 - i as i64;
            }
        }
        s
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All partitions of `n`, largest first part first.
pub fn partitions(n: usize) -> Vec<Partition> {
    partitions_with_max_len(n, usize::MAX)
}

/// Partitions of `n` with at most `max_len` rows.
pub fn partitions_with_max_len(n: usize, max_len: usize) -> Vec<Partition> {
    fn rec(rem: usize, max_part: usize, rows_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        if rows_left == 0 {
            return;
        }
        for p in (1..=max_part.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, max_len, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..10).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30]);
        assert_eq!(partitions_with_max_len(6, 2).len(), 4);
        assert_eq!(partitions(3)[0], Partition(vec![3]));
    }

    #[test]
    fn specht_dimensions_square_sum_to_factorial() {
        for n in 1..9usize {
            let s: u64 = partitions(n).iter().map(|p| p.dim_specht().pow(2)).sum();
            assert_eq!(s, (1..=n as u64).product::<u64>());
        }
        assert_eq!(Partition(vec![2, 2]).dim_specht(), 2);
        assert_eq!(Partition(vec![3, 2, 1]).dim_specht(), 16);
    }

    #[test]
    fn gl_dimensions() {
        assert_eq!(Partition(vec![2]).dim_gl(3), 6);
        assert_eq!(Partition(vec![1, 1]).dim_gl(3), 3);
        assert_eq!(Partition(vec![2, 1]).dim_gl(3), 8);
        assert_eq!(Partition(vec![1, 1, 1]).dim_gl(2), 0);
        // Schur–Weyl: Σ dim_gl · dim_specht = d^n.
        for d in 1..5usize {
            for n in 1..6usize {
                let s: u128 = partitions(n).iter().map(|p| p.dim_gl(d) * p.dim_specht() as u128).sum();
                assert_eq!(s, (d as u128).pow(n as u32));
            }
        }
    }

    #[test]
    fn conjugate_and_contents() {
        let p = Partition(vec![3, 1]);
        assert_eq!(p.conjugate(), Partition(vec![2, 1, 1]));
        assert_eq!(p.content_sum(), 0 + 1 + 2 - 1);
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(Partition::new(vec![2, 1, 0]).unwrap(), Partition(vec![2, 1]));
    }
}
