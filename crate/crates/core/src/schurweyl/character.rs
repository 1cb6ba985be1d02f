use super::Partition;
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

type Key = (Vec<usize>, Vec<usize>);

fn memo() -> &'static RwLock<HashMap<Key, i64>> {
    static MEMO: OnceLock<RwLock<HashMap<Key, i64>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Irreducible character `χ^λ` on the class of cycle type `mu` (parts in any
/// order), by the Murnaghan–Nakayama rule on beta-sets.
pub fn character(lambda: &Partition, mu: &[usize]) -> i64 {
    let mut mu: Vec<usize> = mu.iter().copied().filter(|&m| m > 0).collect();
    mu.sort_unstable_by(|a, b| b.cmp(a));
    if lambda.size() != mu.iter().sum::<usize>() {
        return 0;
    }
    mn(lambda.parts(), &mu)
}

fn mn(lambda: &[usize], mu: &[usize]) -> i64 {
    if mu.is_empty() {
        return if lambda.is_empty() { 1 } else { 0 };
    }
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(&v) = memo().read().unwrap().get(&key) {
        return v;
    }
    let k = mu[0];
    let m = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + (m - 1 - i)).collect();
    let mut total = 0i64;
    for (idx, &b) in beta.iter().enumerate() {
        if b < k || beta.contains(&(b - k)) {
            continue;
        }
        let nb = b - k;
        let height = beta.iter().filter(|&&x| x > nb && x < b).count();
        let mut next = beta.clone();
        next[idx] = nb;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let shape: Vec<usize> = next
            .iter()
            .enumerate()
            .map(|(i, &x)| x - (m - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        let sign = if height % 2 == 0 { 1 } else { -1 };
        total += sign * mn(&shape, &mu[1..]);
    }
    memo().write().unwrap().insert(key, total);
    total
}

/// Number of permutations of cycle type `mu`, i.e. `n!/z_μ`.
pub fn class_size(mu: &[usize]) -> f64 {
    let n: usize = mu.iter().sum();
    let mut z = 1.0;
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &m in mu {
        *counts.entry(m).or_default() += 1;
    }
    for (&len, &mult) in &counts {
        z *= (len as f64).powi(mult as i32);
        z *= (1..=mult).map(|x| x as f64).product::<f64>();
    }
    (1..=n).map(|x| x as f64).product::<f64>() / z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schurweyl::partitions;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn s3_character_table() {
        // rows (3),(2,1),(1,1,1); columns e, transposition, 3-cycle.
        let classes: [&[usize]; 3] = [&[1, 1, 1], &[2, 1], &[3]];
        let expect = [[1, 1, 1], [2, 0, -1], [1, -1, 1]];
        for (i, lam) in [p(&[3]), p(&[2, 1]), p(&[1, 1, 1])].iter().enumerate() {
            for (j, c) in classes.iter().enumerate() {
                assert_eq!(character(lam, c), expect[i][j], "{lam} on {c:?}");
            }
        }
    }

    #[test]
    fn identity_class_gives_dimension() {
        for n in 1..8 {
            for lam in partitions(n) {
                assert_eq!(character(&lam, &vec![1; n]), lam.dim_specht() as i64);
            }
        }
    }

    #[test]
    fn column_orthogonality() {
        for n in 2..7 {
            let classes = partitions(n);
            for a in &classes {
                for b in &classes {
                    let s: i64 = partitions(n).iter().map(|l| character(l, a.parts()) * character(l, b.parts())).sum();
                    let expect = if a == b { (1..=n as i64).product::<i64>() as f64 / class_size(a.parts()) } else { 0.0 };
                    assert!((s as f64 - expect).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 1..8 {
            let s: f64 = partitions(n).iter().map(|c| class_size(c.parts())).sum();
            assert!((s - (1..=n).product::<usize>() as f64).abs() < 1e-9);
        }
    }
}
