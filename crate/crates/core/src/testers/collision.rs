use super::CollisionReport;
use crate::error::{QcError, Result};
use crate::estimators::StateEstimator;
use crate::qcore::{kron, trace_product, CMat};
use crate::rng::Rng;

/// `(1/C(n,2)) Σ_{i<j} tr(A_i A_j)` for Hermitian `A_i`, via
/// `tr(S²) − Σ tr(A_i²)` with `S = Σ A_i`.
pub fn collision_mean(estimates: &[CMat]) -> Result<f64> {
    let n = estimates.len();
    if n < 2 {
        return Err(QcError::InvalidParameter(format!("collision mean needs n >= 2, got {n}")));
    }
    let d = estimates[0].nrows();
    let mut sum = CMat::zeros(d, d);
    let mut diag = 0.0;
    for a in estimates {
        if a.shape() != (d, d) {
            return Err(QcError::Shape(format!("estimate of shape {:?} among {d}x{d}", a.shape())));
        }
        diag += trace_product(a, a).re;
        sum += a;
    }
    let total = trace_product(&sum, &sum).re;
    Ok((total - diag) / (n * (n - 1)) as f64)
}

/// Collision estimate of `tr(E[ρ̂]²)` from `n` independent runs of `source`.
pub fn purity_estimate(source: &dyn StateEstimator, n: usize, rng: &mut Rng) -> Result<CollisionReport> {
    if n < 2 {
        return Err(QcError::InvalidParameter(format!("purity estimate needs n >= 2, got {n}")));
    }
    let estimates = (0..n).map(|_| source.estimate(rng)).collect::<Result<Vec<_>>>()?;
    Ok(CollisionReport {
        statistic: collision_mean(&estimates)?,
        copies_used: n * source.copies_per_estimate(),
        n_batches: n,
        t: source.copies_per_estimate(),
    })
}

/// Collision estimate of `tr(E[ρ̂ − σ̂]²)` from `n` independent runs of
/// each source.
pub fn hs_distance_estimate(
    rho: &dyn StateEstimator,
    sigma: &dyn StateEstimator,
    n: usize,
    rng: &mut Rng,
) -> Result<CollisionReport> {
    if n < 2 {
        return Err(QcError::InvalidParameter(format!("distance estimate needs n >= 2, got {n}")));
    }
    if rho.dim() != sigma.dim() {
        return Err(QcError::Shape(format!("sources act on dimensions {} and {}", rho.dim(), sigma.dim())));
    }
    let estimates = (0..n)
        .map(|_| Ok(rho.estimate(rng)? - sigma.estimate(rng)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(CollisionReport {
        statistic: collision_mean(&estimates)?,
        copies_used: n * (rho.copies_per_estimate() + sigma.copies_per_estimate()),
        n_batches: n,
        t: rho.copies_per_estimate(),
    })
}

/// First two moments `E[A]` and `E[A⊗A]` of a Hermitian estimator.
#[derive(Clone, Debug)]
pub struct EstimatorMoments {
    pub m1: CMat,
    pub m2: CMat,
}

impl EstimatorMoments {
    /// Moments of `A − B` for independent `A`, `B`.
    pub fn difference(a: &EstimatorMoments, b: &EstimatorMoments) -> EstimatorMoments {
        EstimatorMoments {
            m1: &a.m1 - &b.m1,
            m2: &a.m2 + &b.m2 - kron(&a.m1, &b.m1) - kron(&b.m1, &a.m1),
        }
    }

    /// `E[X̄] = tr(E[A]²)`.
    pub fn mean(&self) -> f64 {
        trace_product(&self.m1, &self.m1).re
    }

    /// The two U-statistic variance components:
    /// `ζ₁ = tr(E[A⊗A] (μ⊗μ)) − tr(μ²)²` and `ζ₂ = tr(E[A⊗A]²) − tr(μ²)²`.
    pub fn variance_components(&self) -> (f64, f64) {
        let p = self.mean();
        let zeta1 = trace_product(&self.m2, &kron(&self.m1, &self.m1)).re - p * p;
        let zeta2 = trace_product(&self.m2, &self.m2).re - p * p;
        (zeta1, zeta2)
    }

    /// Exact `Var[X̄]` for `n` independent runs:
    /// `(4(n−2)ζ₁ + 2ζ₂) / (n(n−1))`.
    pub fn collision_variance(&self, n: usize) -> f64 {
        let (z1, z2) = self.variance_components();
        let nf = n as f64;
        (4.0 * (nf - 2.0) * z1 + 2.0 * z2) / (nf * (nf - 1.0))
    }

    /// `n⁻¹ζ₁ + n⁻²ζ₂`, the two-term shape of the variance.
    pub fn two_term(&self, n: usize) -> f64 {
        let (z1, z2) = self.variance_components();
        let nf = n as f64;
        z1 / nf + z2 / (nf * nf)
    }
}
