use super::StateEstimator;
use crate::error::{QcError, Result};
use crate::qcore::{eigh, eye, ginibre, CMat, DensityMatrix, C64};
use crate::rng::Rng;
use crate::schurweyl::{max_monomial, schur_distribution, schur_poly, Partition};
use rand::Rng as _;
use std::sync::atomic::{AtomicU64, Ordering};

const MAX_PROPOSALS: u64 = 50_000_000;

/// PTSW sampler that never forms t-copy matrices.
///
/// Given λ, the Hayashi outcome `ψ ∈ C^d ⊗ C^ℓ` on the purified block enters
/// the estimate only through `A = tr_B|ψ⟩⟨ψ|`, and its density against Haar
/// measure is proportional to `s_λ(spec(ρA))`. Haar `ψ` makes `A` a
/// normalised Wishart matrix, so `A` is drawn directly and accepted with
/// probability `dim(Specht_λ) s_λ(spec(ρA)) / x^λ ≤ 1`, where `x^λ` is the
/// top eigenvalue of `q_λ(ρ)`. The output distribution equals the dense
/// pipeline's.
#[derive(Debug)]
pub struct PtswReduced {
    d: usize,
    t: usize,
    spectrum: Vec<f64>,
    basis: CMat,
    outcomes: Vec<(Partition, f64, f64)>,
    weights: Vec<f64>,
    proposals: AtomicU64,
    accepted: AtomicU64,
}

impl PtswReduced {
    pub fn new(rho: &DensityMatrix, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(QcError::InvalidParameter("t must be at least 1".into()));
        }
        let (w, basis) = eigh(rho.mat());
        let spectrum: Vec<f64> = w.into_iter().map(|x| x.max(0.0)).collect();
        let outcomes: Vec<(Partition, f64, f64)> = schur_distribution(&spectrum, t)
            .into_iter()
            .filter(|(_, p)| *p > 1e-14)
            .map(|(l, p)| {
                let top = max_monomial(&l, &spectrum);
                (l, p, top)
            })
            .collect();
        let weights = outcomes.iter().map(|o| o.1).collect();
        Ok(PtswReduced {
            d: rho.dim(),
            t,
            spectrum,
            basis,
            outcomes,
            weights,
            proposals: AtomicU64::new(0),
            accepted: AtomicU64::new(0),
        })
    }

    pub fn outcome_distribution(&self) -> Vec<(Partition, f64)> {
        self.outcomes.iter().map(|(l, p, _)| (l.clone(), *p)).collect()
    }

    pub fn acceptance_counts(&self) -> (u64, u64) {
        (self.proposals.load(Ordering::Relaxed), self.accepted.load(Ordering::Relaxed))
    }

    /// One run, returning λ and `ρ̂`.
    pub fn sample(&self, rng: &mut Rng) -> Result<(Partition, CMat)> {
        let i = crate::rng::categorical(&self.weights, rng)?;
        let (lambda, _, top) = &self.outcomes[i];
        let ell = lambda.len();
        let d = self.d;
        let dim_specht = lambda.dim_specht() as f64;
        let sqrt_x: Vec<f64> = self.spectrum.iter().map(|x| x.sqrt()).collect();
        for k in 1..=MAX_PROPOSALS {
            let g = ginibre(d, ell, rng);
            let mut a = &g * g.adjoint();
            let tr = a.trace().re;
            a /= C64::new(tr, 0.0);
            let b = CMat::from_fn(d, d, |r, s| a[(r, s)] * (sqrt_x[r] * sqrt_x[s]));
            let y: Vec<f64> = eigh(&b).0.into_iter().map(|v| v.max(0.0)).collect();
            let ratio = dim_specht * schur_poly(lambda, &y) / top;
            debug_assert!(ratio <= 1.0 + 1e-9, "acceptance ratio {ratio} exceeds one");
            if rng.random::<f64>() < ratio {
                self.proposals.fetch_add(k, Ordering::Relaxed);
                self.accepted.fetch_add(1, Ordering::Relaxed);
                let big_d = (d * ell) as f64;
                let tf = self.t as f64;
                let local = a * C64::new((big_d + tf) / tf, 0.0) - eye(d) * C64::new(ell as f64 / tf, 0.0);
                let est = &self.basis * local * self.basis.adjoint();
                return Ok((lambda.clone(), est));
            }
        }
        Err(QcError::UnreachableBranch("spectral PTSW sampler did not accept".into()))
    }
}

impl StateEstimator for PtswReduced {
    fn dim(&self) -> usize {
        self.d
    }

    fn copies_per_estimate(&self) -> usize {
        self.t
    }

    fn estimate(&self, rng: &mut Rng) -> Result<CMat> {
        Ok(self.sample(rng)?.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::PtswEstimator;
    use crate::qcore::{kron, max_abs_diff, Caps};

    #[test]
    fn matches_dense_pipeline_moments() {
        let caps = Caps::default();
        let rho = DensityMatrix::from_diag(&[0.65, 0.35]).unwrap();
        let t = 3;
        let dense = PtswEstimator::new(&rho, t, &caps).unwrap();
        let m2 = dense.second_moment().unwrap();
        let red = PtswReduced::new(&rho, t).unwrap();
        let mut rng = crate::rng::stream(8, "reduced", 0);
        let n = 30000;
        let mut acc1 = CMat::zeros(2, 2);
        let mut acc2 = CMat::zeros(4, 4);
        for _ in 0..n {
            let (_, e) = red.sample(&mut rng).unwrap();
            acc2 += kron(&e, &e);
            acc1 += e;
        }
        acc1 /= C64::new(n as f64, 0.0);
        acc2 /= C64::new(n as f64, 0.0);
        assert!(max_abs_diff(&acc1, rho.mat()) < 0.03);
        assert!(max_abs_diff(&acc2, &m2) < 0.06);
    }
}
