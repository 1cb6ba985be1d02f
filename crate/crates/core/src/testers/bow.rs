use super::TesterVerdict;
use crate::error::{QcError, Result};
use crate::qcore::{binom, eigh, kron, tensor_power, trace_product, Caps, CMat, DensityMatrix, C64};
use crate::rng::Rng;
use crate::schurweyl::{apply_isotypic, partitions_with_max_len, schur_distribution, Partition};
use rand::Rng as _;

/// Probability of the symmetric (+1) outcome when measuring SWAP on `ρ ⊗ σ`.
pub fn swap_test_probability(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    (1.0 + trace_product(rho.mat(), sigma.mat()).re) / 2.0
}

/// One SWAP measurement on `ρ ⊗ σ`; `true` for the +1 outcome.
pub fn swap_test(rho: &DensityMatrix, sigma: &DensityMatrix, rng: &mut Rng) -> bool {
    rng.random::<f64>() < swap_test_probability(rho, sigma)
}

fn content(parts: &[usize]) -> f64 {
    Partition::new(parts.to_vec()).map(|p| p.content_sum() as f64).unwrap_or(0.0)
}

/// Per-batch estimate of `‖ρ − σ‖₂²` from `t` copies of each state.
///
/// Weak Schur sampling is applied to `ρ^{⊗t}` (outcome λ), to `σ^{⊗t}`
/// (outcome μ) and to the joint `2t` register (outcome ν); the three
/// measurements commute. The sum of transpositions acts on each isotypic
/// block as its content, so with `C = C(t,2)`
///
/// `ẑ = c(λ)/C + c(μ)/C − (2/t²)(c(ν) − c(λ) − c(μ))`
///
/// is unbiased for `tr ρ² + tr σ² − 2 tr ρσ`. For `t = 2` this is the
/// SWAP test on each pair and across.
#[derive(Clone, Debug)]
pub struct BowEstimator {
    t: usize,
    /// `(ẑ, probability)` for every joint outcome.
    table: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl BowEstimator {
    /// Qubits use the spin-coupling route; other dimensions the dense one.
    pub fn new(rho: &DensityMatrix, sigma: &DensityMatrix, t: usize, caps: &Caps) -> Result<Self> {
        if rho.dim() == 2 && sigma.dim() == 2 {
            Self::qubit(rho, sigma, t, caps)
        } else {
            Self::dense(rho, sigma, t, caps)
        }
    }

    fn check(rho: &DensityMatrix, sigma: &DensityMatrix, t: usize) -> Result<()> {
        if t < 2 {
            return Err(QcError::InvalidParameter(format!("batch size must be at least 2, got {t}")));
        }
        if rho.dim() != sigma.dim() {
            return Err(QcError::Shape(format!("states of dimension {} and {}", rho.dim(), sigma.dim())));
        }
        Ok(())
    }

    fn value(t: usize, cl: f64, cm: f64, cn: f64) -> f64 {
        let pairs = binom(t, 2);
        let tf = t as f64;
        cl / pairs + cm / pairs - 2.0 / (tf * tf) * (cn - cl - cm)
    }

    fn from_table(t: usize, table: Vec<(f64, f64)>) -> Result<Self> {
        let total: f64 = table.iter().map(|x| x.1).sum();
        if (total - 1.0).abs() > 1e-8 {
            return Err(QcError::UnreachableBranch(format!("joint outcome probabilities sum to {total}")));
        }
        let weights = table.iter().map(|x| x.1.max(0.0)).collect();
        Ok(BowEstimator { t, table, weights })
    }

    /// Joint outcome distribution from dense isotypic projectors on the
    /// `2t`-register.
    pub fn dense(rho: &DensityMatrix, sigma: &DensityMatrix, t: usize, caps: &Caps) -> Result<Self> {
        Self::check(rho, sigma, t)?;
        let d = rho.dim();
        caps.check_dim("d^(2t)", d, 2 * t)?;
        let pr = tensor_power(rho.mat(), t);
        let ps = tensor_power(sigma.mat(), t);
        let mut table = Vec::new();
        let lams = partitions_with_max_len(t, d);
        let nus = partitions_with_max_len(2 * t, d);
        for l in &lams {
            let bl = apply_isotypic(l, &pr, d, caps)?;
            if bl.trace().re < 1e-15 {
                continue;
            }
            for m in &lams {
                let bm = apply_isotypic(m, &ps, d, caps)?;
                if bm.trace().re < 1e-15 {
                    continue;
                }
                let joint = kron(&bl, &bm);
                for nu in &nus {
                    let p = apply_isotypic(nu, &joint, d, caps)?.trace().re;
                    if p > 1e-15 {
                        let z = Self::value(t, l.content_sum() as f64, m.content_sum() as f64, nu.content_sum() as f64);
                        table.push((z, p));
                    }
                }
            }
        }
        Self::from_table(t, table)
    }

    /// Joint outcome distribution for qubits via spin coupling: λ = (t−k, k)
    /// carries spin `j = (t−2k)/2` with the state `Sym^{2j}(ρ)` on the spin
    /// space, and ν = (t+J, t−J) for total spin `J` of `j₁ ⊗ j₂`.
    pub fn qubit(rho: &DensityMatrix, sigma: &DensityMatrix, t: usize, caps: &Caps) -> Result<Self> {
        Self::check(rho, sigma, t)?;
        if rho.dim() != 2 {
            return Err(QcError::InvalidDimension(format!("spin route needs qubits, got d = {}", rho.dim())));
        }
        caps.check_dim("2^t", 2, t)?;
        let lam_rho = schur_distribution(&rho.spectrum(), t);
        let lam_sigma = schur_distribution(&sigma.spectrum(), t);
        let mut table = Vec::new();
        for (l, pl) in &lam_rho {
            if *pl < 1e-15 {
                continue;
            }
            let a = normalised(&symmetric_power(rho.mat(), spin_twice(l)));
            for (m, pm) in &lam_sigma {
                if *pm < 1e-15 {
                    continue;
                }
                let b = normalised(&symmetric_power(sigma.mat(), spin_twice(m)));
                for (two_j, pj) in total_spin_distribution(&a, &b) {
                    let p = pl * pm * pj;
                    if p > 1e-15 {
                        let nu = [(2 * t + two_j) / 2, (2 * t - two_j) / 2];
                        let z = Self::value(t, l.content_sum() as f64, m.content_sum() as f64, content(&nu));
                        table.push((z, p));
                    }
                }
            }
        }
        Self::from_table(t, table)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Outcome table `(ẑ, probability)`.
    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    pub fn exact_mean(&self) -> f64 {
        self.table.iter().map(|(z, p)| z * p).sum()
    }

    pub fn exact_variance(&self) -> f64 {
        let mu = self.exact_mean();
        self.table.iter().map(|(z, p)| p * (z - mu) * (z - mu)).sum()
    }

    /// One batch: `t` copies of each state.
    pub fn sample(&self, rng: &mut Rng) -> Result<f64> {
        Ok(self.table[crate::rng::categorical(&self.weights, rng)?].0)
    }
}

/// `2j = λ₁ − λ₂` for a qubit partition.
fn spin_twice(l: &Partition) -> usize {
    let p = l.parts();
    p[0] - p.get(1).copied().unwrap_or(0)
}

fn normalised(m: &CMat) -> CMat {
    m / m.trace()
}

/// Matrix of `M^{⊗m}` on the symmetric subspace in the Dicke basis
/// `|D_k⟩`, `k` = number of ones.
fn symmetric_power(mat: &CMat, m: usize) -> CMat {
    if m == 0 {
        return CMat::from_element(1, 1, C64::new(1.0, 0.0));
    }
    let dim = 1usize << m;
    let mut basis = CMat::zeros(dim, m + 1);
    for x in 0..dim {
        let k = x.count_ones() as usize;
        basis[(x, k)] = C64::new(1.0 / binom(m, k).sqrt(), 0.0);
    }
    basis.adjoint() * tensor_power(mat, m) * basis
}

/// Collective spin operators `(J_z, J_+)` of spin `j = m/2` in the Dicke
/// basis, where `|D_k⟩` has `J_z = j − k`.
fn spin_ops(m: usize) -> (CMat, CMat) {
    let j = m as f64 / 2.0;
    let mut jz = CMat::zeros(m + 1, m + 1);
    let mut jp = CMat::zeros(m + 1, m + 1);
    for k in 0..=m {
        let mz = j - k as f64;
        jz[(k, k)] = C64::new(mz, 0.0);
        if k >= 1 {
            jp[(k - 1, k)] = C64::new(((j - mz) * (j + mz + 1.0)).sqrt(), 0.0);
        }
    }
    (jz, jp)
}

/// Distribution of `2J` when total spin is measured on `A ⊗ B`.
fn total_spin_distribution(a: &CMat, b: &CMat) -> Vec<(usize, f64)> {
    let (m1, m2) = (a.nrows() - 1, b.nrows() - 1);
    let (z1, p1) = spin_ops(m1);
    let (z2, p2) = spin_ops(m2);
    let (i1, i2) = (CMat::identity(m1 + 1, m1 + 1), CMat::identity(m2 + 1, m2 + 1));
    let casimir = |z: &CMat, p: &CMat| z * z + (p * p.adjoint() + p.adjoint() * p) * C64::new(0.5, 0.0);
    let j2 = kron(&casimir(&z1, &p1), &i2)
        + kron(&i1, &casimir(&z2, &p2))
        + kron(&z1, &z2) * C64::new(2.0, 0.0)
        + kron(&p1, &p2.adjoint())
        + kron(&p1.adjoint(), &p2);
    let (w, v) = eigh(&j2);
    let state = kron(a, b);
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (k, &val) in w.iter().enumerate() {
        // J(J+1) = val  ⇒  2J = √(4 val + 1) − 1.
        let two_j = ((4.0 * val + 1.0).max(0.0).sqrt() - 1.0).round() as usize;
        let col = v.column(k);
        let p = (col.adjoint() * &state * col)[(0, 0)].re;
        match out.iter_mut().find(|e| e.0 == two_j) {
            Some(e) => e.1 += p,
            None => out.push((two_j, p)),
        }
    }
    out.sort_by_key(|e| e.0);
    out
}

/// Mean of `n` independent per-batch estimates, accepted iff at most
/// `3ε²/4`.
pub fn bow_batched_test(est: &BowEstimator, eps_hs: f64, n: usize, rng: &mut Rng) -> Result<TesterVerdict> {
    if n == 0 {
        return Err(QcError::InvalidParameter("need at least one batch".into()));
    }
    let mut acc = 0.0;
    for _ in 0..n {
        acc += est.sample(rng)?;
    }
    let z = acc / n as f64;
    let threshold = 0.75 * eps_hs * eps_hs;
    Ok(TesterVerdict {
        accept: z <= threshold,
        statistic: z,
        raw_statistic: z,
        threshold,
        copies_used: 2 * n * est.t,
        n_batches: n,
        t: est.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_state, outer, random_density};

    fn hs2(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        let diff = a.mat() - b.mat();
        trace_product(&diff, &diff).re
    }

    #[test]
    fn swap_test_is_certain_on_equal_pure_states() {
        let mut rng = crate::rng::stream(1, "bow", 0);
        let psi = haar_state(3, &mut rng);
        let p = DensityMatrix::new(outer(&psi, &psi)).unwrap();
        assert!((swap_test_probability(&p, &p) - 1.0).abs() < 1e-12);
        assert!((0..50).all(|_| swap_test(&p, &p, &mut rng)));
    }

    #[test]
    fn symmetric_power_matches_low_degree_forms() {
        let mut rng = crate::rng::stream(1, "bow", 1);
        let r = random_density(2, 2, &mut rng).unwrap();
        let s1 = symmetric_power(r.mat(), 1);
        assert!(crate::qcore::max_abs_diff(&s1, r.mat()) < 1e-12);
        // tr Sym^m(M) is the complete homogeneous polynomial h_m(spec M).
        let x = r.spectrum();
        let h3: f64 = (0..=3).map(|k| x[0].powi(k) * x[1].powi(3 - k)).sum();
        assert!((symmetric_power(r.mat(), 3).trace().re - h3).abs() < 1e-12);
    }

    #[test]
    fn spin_route_matches_dense_route() {
        let caps = Caps::default();
        let mut rng = crate::rng::stream(1, "bow", 2);
        for t in [2, 3] {
            let r = random_density(2, 2, &mut rng).unwrap();
            let s = random_density(2, 2, &mut rng).unwrap();
            let a = BowEstimator::qubit(&r, &s, t, &caps).unwrap();
            let b = BowEstimator::dense(&r, &s, t, &caps).unwrap();
            assert!((a.exact_mean() - b.exact_mean()).abs() < 1e-10, "t={t}");
            assert!((a.exact_variance() - b.exact_variance()).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn unbiased_for_squared_distance() {
        let caps = Caps::default();
        let mut rng = crate::rng::stream(1, "bow", 3);
        for t in [2, 3, 5, 8] {
            let r = random_density(2, 2, &mut rng).unwrap();
            let s = random_density(2, 1, &mut rng).unwrap();
            let e = BowEstimator::new(&r, &s, t, &caps).unwrap();
            assert!((e.exact_mean() - hs2(&r, &s)).abs() < 1e-10, "t={t}");
        }
        let r = random_density(3, 3, &mut rng).unwrap();
        let s = random_density(3, 3, &mut rng).unwrap();
        let e = BowEstimator::new(&r, &s, 2, &caps).unwrap();
        assert!((e.exact_mean() - hs2(&r, &s)).abs() < 1e-10);
    }

    #[test]
    fn rejects_single_copy_batches() {
        let r = DensityMatrix::maximally_mixed(2);
        assert!(matches!(BowEstimator::new(&r, &r, 1, &Caps::default()), Err(QcError::InvalidParameter(_))));
    }
}
