use super::{character, class_size, partitions_with_max_len, Partition};
use std::collections::HashMap;

/// Schur polynomial `s_λ(x)` by the branching rule, summing over
/// interlacing sub-partitions one variable at a time. All terms are
/// non-negative for non-negative `x`, so the evaluation is stable.
pub fn schur_poly(lambda: &Partition, x: &[f64]) -> f64 {
    if lambda.len() > x.len() {
        return 0.0;
    }
    let mut memo: HashMap<(Vec<usize>, usize), f64> = HashMap::new();
    branch(lambda.parts(), x, x.len(), &mut memo)
}

fn branch(lam: &[usize], x: &[f64], n: usize, memo: &mut HashMap<(Vec<usize>, usize), f64>) -> f64 {
    if lam.is_empty() {
        return 1.0;
    }
    if lam.len() > n || n == 0 {
        return 0.0;
    }
    let key = (lam.to_vec(), n);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let xn = x[n - 1];
    let size: usize = lam.iter().sum();
    let mut total = 0.0;
    // μ interlaces λ: λ_{i+1} <= μ_i <= λ_i, with ℓ(μ) <= n - 1.
    let mut mu = vec![0usize; lam.len()];
    fn rec(
        i: usize,
        lam: &[usize],
        mu: &mut Vec<usize>,
        x: &[f64],
        n: usize,
        xn: f64,
        size: usize,
        total: &mut f64,
        memo: &mut HashMap<(Vec<usize>, usize), f64>,
    ) {
        if i == lam.len() {
            let trimmed: Vec<usize> = mu.iter().copied().filter(|&m| m > 0).collect();
            if trimmed.len() > n - 1 {
                return;
            }
            let diff = size - trimmed.iter().sum::<usize>();
            let w = if diff == 0 { 1.0 } else { xn.powi(diff as i32) };
            if w == 0.0 {
                return;
            }
            *total += w * branch(&trimmed, x, n - 1, memo);
            return;
        }
        let lo = lam.get(i + 1).copied().unwrap_or(0);
        for m in lo..=lam[i] {
            mu[i] = m;
            rec(i + 1, lam, mu, x, n, xn, size, total, memo);
        }
    }
    rec(0, lam, &mut mu, x, n, xn, size, &mut total, memo);
    memo.insert(key, total);
    total
}

pub fn power_sum(x: &[f64], k: usize) -> f64 {
    x.iter().map(|&v| v.powi(k as i32)).sum()
}

/// Schur polynomial through the character expansion
/// `s_λ = Σ_μ χ^λ(μ) p_μ / z_μ`.
pub fn schur_poly_power_sums(lambda: &Partition, x: &[f64]) -> f64 {
    let n = lambda.size();
    let nfact: f64 = (1..=n).map(|k| k as f64).product();
    super::partitions(n)
        .iter()
        .map(|mu| {
            let pm: f64 = mu.parts().iter().map(|&k| power_sum(x, k)).product();
            character(lambda, mu.parts()) as f64 * class_size(mu.parts()) * pm / nfact
        })
        .sum()
}

/// Largest monomial `x^λ` with `x` sorted in decreasing order; it equals the
/// top eigenvalue of the `GL` irrep `q_λ(diag x)`.
pub fn max_monomial(lambda: &Partition, x: &[f64]) -> f64 {
    let mut xs = x.to_vec();
    xs.sort_by(|a, b| b.total_cmp(a));
    lambda
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| xs.get(i).copied().unwrap_or(0.0).powi(p as i32))
        .product()
}

/// Weak Schur sampling distribution `p(λ) = dim(Specht_λ) · s_λ(x)` over
/// partitions with at most `len(x)` rows, for a spectrum `x`.
pub fn schur_distribution(x: &[f64], t: usize) -> Vec<(Partition, f64)> {
    partitions_with_max_len(t, x.len())
        .into_iter()
        .map(|lam| {
            let p = lam.dim_specht() as f64 * schur_poly(&lam, x);
            (lam, p)
        })
        .collect()
}
