use crate::error::{QcError, Result};
use crate::qcore::{eigh, haar_state, psd_factor, sym_dim, CMat, CVec};
use crate::rng::Rng;
use rand::Rng as _;
use std::sync::atomic::{AtomicU64, Ordering};

/// Exact sampler for the Hayashi measurement `{D[n] |ψ⟩⟨ψ|^{⊗n} dψ}` on a
/// state `ψ_sym = L L†` supported on the symmetric subspace of `(C^D)^{⊗n}`.
/// Haar proposals are accepted with probability
/// `⟨ψ^{⊗n}|ψ_sym|ψ^{⊗n}⟩ / λ_max(ψ_sym)`.
#[derive(Debug)]
pub struct HayashiSampler {
    big_d: usize,
    n: usize,
    factor_adj: CMat,
    lambda_max: f64,
    proposals: AtomicU64,
    accepted: AtomicU64,
}

const MAX_PROPOSALS: u64 = 50_000_000;

impl Clone for HayashiSampler {
    fn clone(&self) -> Self {
        HayashiSampler {
            big_d: self.big_d,
            n: self.n,
            factor_adj: self.factor_adj.clone(),
            lambda_max: self.lambda_max,
            proposals: AtomicU64::new(0),
            accepted: AtomicU64::new(0),
        }
    }
}

impl HayashiSampler {
    pub fn from_factor(factor: &CMat, big_d: usize, n: usize) -> Result<Self> {
        let dim = big_d.pow(n as u32);
        if factor.nrows() != dim || factor.ncols() == 0 {
            return Err(QcError::Shape(format!("factor {:?} does not act on (C^{big_d})^{n}", factor.shape())));
        }
        let gram = factor.adjoint() * factor;
        let (w, _) = eigh(&gram);
        let lambda_max = *w.last().unwrap();
        Ok(HayashiSampler {
            big_d,
            n,
            factor_adj: factor.adjoint(),
            lambda_max,
            proposals: AtomicU64::new(0),
            accepted: AtomicU64::new(0),
        })
    }

    pub fn from_state(psi_sym: &CMat, big_d: usize, n: usize) -> Result<Self> {
        Self::from_factor(&psd_factor(psi_sym, 1e-14), big_d, n)
    }

    pub fn local_dim(&self) -> usize {
        self.big_d
    }

    pub fn copies(&self) -> usize {
        self.n
    }

    /// Expected acceptance probability `1/(D[n] λ_max)`.
    pub fn expected_acceptance(&self) -> f64 {
        1.0 / (sym_dim(self.big_d, self.n) * self.lambda_max)
    }

    /// Observed (proposals, accepted) since construction.
    pub fn acceptance_counts(&self) -> (u64, u64) {
        (self.proposals.load(Ordering::Relaxed), self.accepted.load(Ordering::Relaxed))
    }

    fn overlap(&self, psi: &CVec) -> f64 {
        let mut pow = psi.clone();
        for _ in 1..self.n {
            pow = pow.kronecker(psi);
        }
        (&self.factor_adj * pow).norm_squared()
    }

    pub fn sample(&self, rng: &mut Rng) -> Result<CVec> {
        for k in 1..=MAX_PROPOSALS {
            let psi = haar_state(self.big_d, rng);
            let a = self.overlap(&psi) / self.lambda_max;
            if rng.random::<f64>() < a {
                self.proposals.fetch_add(k, Ordering::Relaxed);
                self.accepted.fetch_add(1, Ordering::Relaxed);
                return Ok(psi);
            }
        }
        Err(QcError::UnreachableBranch("Hayashi rejection sampler did not accept".into()))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{hayashi_first_moment, register_marginals};
    use crate::qcore::{max_abs_diff, outer, symmetric_projector, Caps, C64};
    use crate::schurweyl::symmetrize_columns;

    #[test]
    fn first_moment_matches_closed_form() {
        let mut rng = crate::rng::stream(3, "hayashi", 0);
        let (big_d, n) = (2, 2);
        let v = CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.3, 0.2), C64::new(0.0, 0.0), C64::new(0.5, 0.0)]);
        let l = symmetrize_columns(&CMat::from_columns(&[v]), big_d, n);
        let psi = &l * l.adjoint();
        let psi = &psi / psi.trace();
        let sampler = HayashiSampler::from_state(&psi, big_d, n).unwrap();
        let trials = 40000;
        let mut acc = CMat::zeros(big_d, big_d);
        for _ in 0..trials {
            let s = sampler.sample(&mut rng).unwrap();
            acc += outer(&s, &s);
        }
        acc /= C64::new(trials as f64, 0.0);
        let (m1, _) = register_marginals(&psi, big_d, n).unwrap();
        assert!(max_abs_diff(&acc, &hayashi_first_moment(&m1, n)) < 0.01);
        let (prop, accd) = sampler.acceptance_counts();
        let rate = accd as f64 / prop as f64;
        assert!((rate - sampler.expected_acceptance()).abs() < 0.02);
    }

    #[test]
    fn maximally_mixed_symmetric_state_always_accepts() {
        let p = symmetric_projector(2, 3, &Caps::default()).unwrap();
        let psi = &p / C64::new(4.0, 0.0);
        let s = HayashiSampler::from_state(&psi, 2, 3).unwrap();
        assert!((s.expected_acceptance() - 1.0).abs() < 1e-12);
    }
}
