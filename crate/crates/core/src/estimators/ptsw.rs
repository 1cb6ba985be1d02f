use super::{
    gps_estimate, ptsw_conditional_second_moment, HayashiSampler, PurificationChannel, StateEstimator,
};
use crate::error::{QcError, Result};
use crate::qcore::{
    all_permutations, apply_perm_left, basis_map, cycle_type, eye, factorial, hermitize, kron,
    max_abs_diff, partial_trace, psd_factor, tensor_power, Caps, CMat, CVec, DensityMatrix, C64,
};
use crate::rng::Rng;
use crate::schurweyl::{haar_moment_oracle_factor, schur_outcomes, Partition};
use std::collections::HashMap;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// One weak Schur sampling outcome together with its purified block state
/// `τ_λ = L L†` on `(C^d ⊗ C^ℓ)^{⊗t}`, `ℓ = ℓ(λ)`.
#[derive(Clone, Debug)]
pub struct PtswBlock {
    pub lambda: Partition,
    pub prob: f64,
    pub ell: usize,
    pub conditional: CMat,
    pub tau_factor: CMat,
    sampler: HayashiSampler,
}

impl PtswBlock {
    pub fn local_dim(&self) -> usize {
        self.conditional_dim_a() * self.ell
    }

    fn conditional_dim_a(&self) -> usize {
        self.sampler.local_dim() / self.ell
    }

    pub fn sampler(&self) -> &HayashiSampler {
        &self.sampler
    }

    pub fn tau(&self) -> CMat {
        &self.tau_factor * self.tau_factor.adjoint()
    }

    /// `(τ)_{A1}` and `(τ)_{A1A2}`; the latter is zero for a single copy.
    pub fn tau_marginals(&self, t: usize) -> Result<(CMat, CMat)> {
        let d = self.conditional_dim_a();
        let tau = self.tau();
        let dims: Vec<usize> = (0..2 * t).map(|k| if k % 2 == 0 { d } else { self.ell }).collect();
        let a1 = partial_trace(&tau, &dims, &[0])?;
        let a12 = if t >= 2 { partial_trace(&tau, &dims, &[0, 2])? } else { CMat::zeros(d * d, d * d) };
        Ok((a1, a12))
    }
}

/// Map a Hayashi outcome on `C^d ⊗ C^ℓ` to the system estimate
/// `ρ̂ = tr_B σ̂ = (D+t)/t · tr_B|ψ⟩⟨ψ| − (ℓ/t) I`.
pub(crate) fn system_estimate(psi: &CVec, d: usize, ell: usize, t: usize) -> CMat {
    let sigma = gps_estimate(psi, t);
    let mut out = CMat::zeros(d, d);
    for a in 0..d {
        for a2 in 0..d {
            let mut s = C64::new(0.0, 0.0);
            for b in 0..ell {
                s += sigma[(a * ell + b, a2 * ell + b)];
            }
            out[(a, a2)] = s;
        }
    }
    out
}

/// The t-copy pipeline: weak Schur sampling, the random purification
/// channel on the observed block, the Hayashi measurement with the GPS
/// estimator, and a partial trace over the purifying registers.
#[derive(Clone, Debug)]
pub struct PtswEstimator {
    d: usize,
    t: usize,
    blocks: Vec<PtswBlock>,
    weights: Vec<f64>,
}

impl PtswEstimator {
    /// True when every purified block fits under the dimension cap.
    pub fn fits(d: usize, t: usize, caps: &Caps) -> bool {
        caps.check_dim("(d·ℓ)^t", d * d.min(t), t).is_ok()
    }

    pub fn new(rho: &DensityMatrix, t: usize, caps: &Caps) -> Result<Self> {
        let d = rho.dim();
        let outcomes = schur_outcomes(rho, t, caps)?;
        let mut channels: HashMap<usize, PurificationChannel> = HashMap::new();
        let mut blocks = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            let ell = o.lambda.len();
            if !channels.contains_key(&ell) {
                channels.insert(ell, PurificationChannel::build(d, ell, t, caps)?);
            }
            let tau = hermitize(&channels[&ell].apply(&o.conditional)?);
            let factor = psd_factor(&tau, 1e-13);
            let sampler = HayashiSampler::from_factor(&factor, d * ell, t)?;
            blocks.push(PtswBlock { lambda: o.lambda, prob: o.prob, ell, conditional: o.conditional, tau_factor: factor, sampler });
        }
        let weights = blocks.iter().map(|b| b.prob).collect();
        Ok(PtswEstimator { d, t, blocks, weights })
    }

    pub fn copies(&self) -> usize {
        self.t
    }

    pub fn blocks(&self) -> &[PtswBlock] {
        &self.blocks
    }

    /// One run of the pipeline, returning the block index and `ρ̂`.
    pub fn sample(&self, rng: &mut Rng) -> Result<(usize, CMat)> {
        let i = crate::rng::categorical(&self.weights, rng)?;
        let b = &self.blocks[i];
        let psi = b.sampler.sample(rng)?;
        Ok((i, system_estimate(&psi, self.d, b.ell, self.t)))
    }

    /// Closed-form `E[ρ̂⊗ρ̂ | λ]` from the marginals of `τ_λ`.
    pub fn conditional_second_moment(&self, i: usize) -> Result<CMat> {
        let b = &self.blocks[i];
        let (a1, a12) = b.tau_marginals(self.t)?;
        Ok(ptsw_conditional_second_moment(&a1, &a12, b.ell, self.t))
    }

    /// `E[ρ̂ | λ]` and `E[ρ̂⊗ρ̂ | λ]` by composing the exact Hayashi moments
    /// of `τ_λ` with the debiasing map and the partial trace.
    pub fn conditional_moments_oracle(&self, i: usize, caps: &Caps) -> Result<(CMat, CMat)> {
        let b = &self.blocks[i];
        let (d, ell, t) = (self.d, b.ell, self.t);
        let big_d = d * ell;
        let m1 = haar_moment_oracle_factor(&b.tau_factor, big_d, t, 1, caps)?;
        let m2 = haar_moment_oracle_factor(&b.tau_factor, big_d, t, 2, caps)?;
        let a = (big_d + t) as f64 / t as f64;
        let tf = t as f64;
        let id = eye(big_d);
        let s1 = &m1 * c(a) - &id / c(tf);
        let s2 = &m2 * c(a * a) - (kron(&m1, &id) + kron(&id, &m1)) * c(a / tf) + eye(big_d * big_d) / c(tf * tf);
        let r1 = partial_trace(&s1, &[d, ell], &[0])?;
        let r2 = partial_trace(&s2, &[d, ell, d, ell], &[0, 2])?;
        Ok((r1, r2))
    }

    /// Exact `E[ρ̂]` and `E[ρ̂⊗ρ̂]` through the oracle.
    pub fn exact_moments_oracle(&self, caps: &Caps) -> Result<(CMat, CMat)> {
        let mut m1 = CMat::zeros(self.d, self.d);
        let mut m2 = CMat::zeros(self.d * self.d, self.d * self.d);
        for (i, b) in self.blocks.iter().enumerate() {
            let (r1, r2) = self.conditional_moments_oracle(i, caps)?;
            m1 += r1 * c(b.prob);
            m2 += r2 * c(b.prob);
        }
        Ok((m1, m2))
    }

    /// Exact `E[ρ̂⊗ρ̂]` from the closed form.
    pub fn second_moment(&self) -> Result<CMat> {
        let mut m2 = CMat::zeros(self.d * self.d, self.d * self.d);
        for (i, b) in self.blocks.iter().enumerate() {
            m2 += self.conditional_second_moment(i)? * c(b.prob);
        }
        Ok(m2)
    }
}

impl StateEstimator for PtswEstimator {
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

/// Single-shot PTSW estimate of `ρ` from `t` copies.
pub fn ptsw_estimate(rho: &DensityMatrix, t: usize, rng: &mut Rng, caps: &Caps) -> Result<CMat> {
    PtswEstimator::new(rho, t, caps)?.estimate(rng)
}

/// System marginal on the first `k` copies of `τ_λ`, computed on the system
/// registers alone: tracing the purifying registers of
/// `Π_sym(ρ|_λ ⊗ I_B)` turns each `V(π)` into `ℓ^{c(π)} V_A(π)`.
pub fn tau_marginal_reduced(conditional: &CMat, d: usize, ell: usize, t: usize, k: usize) -> Result<CMat> {
    if k == 0 || k > t {
        return Err(QcError::InvalidParameter(format!("marginal size {k} must be in 1..={t}")));
    }
    let mut m = CMat::zeros(conditional.nrows(), conditional.ncols());
    for perm in all_permutations(t) {
        let w = (ell as f64).powi(cycle_type(&perm).len() as i32) / factorial(t) as f64;
        apply_perm_left(&basis_map(&perm, d), conditional, c(w), &mut m);
    }
    let tr = m.trace();
    let keep: Vec<usize> = (0..k).collect();
    Ok(partial_trace(&m, &vec![d; t], &keep)? / tr)
}

/// Largest entrywise deviation of `Σ_λ p(λ) (τ_λ)_{A1..Ak}` from `ρ^{⊗k}`.
/// Uses the dense purified states when they fit, else the reduced formula.
pub fn tau_lambda_marginal_check(rho: &DensityMatrix, t: usize, k: usize, caps: &Caps) -> Result<f64> {
    let d = rho.dim();
    let target = tensor_power(rho.mat(), k);
    let mut acc = CMat::zeros(target.nrows(), target.ncols());
    if PtswEstimator::fits(d, t, caps) {
        let est = PtswEstimator::new(rho, t, caps)?;
        for b in est.blocks() {
            let dims: Vec<usize> = (0..2 * t).map(|j| if j % 2 == 0 { d } else { b.ell }).collect();
            let keep: Vec<usize> = (0..k).map(|j| 2 * j).collect();
            acc += partial_trace(&b.tau(), &dims, &keep)? * c(b.prob);
        }
    } else {
        for o in schur_outcomes(rho, t, caps)? {
            acc += tau_marginal_reduced(&o.conditional, d, o.lambda.len(), t, k)? * c(o.prob);
        }
    }
    Ok(max_abs_diff(&acc, &target))
}
