use super::{collision_mean, TesterVerdict};
use crate::error::{QcError, Result};
use crate::estimators::{ptsw_source, StateEstimator};
use crate::qcore::{Caps, DensityMatrix};
use crate::rng::Rng;

/// Tests `ρ = I/d` against `‖ρ − I/d‖₁ ≥ ε` with `t`-copy PTSW estimates.
///
/// Each repetition computes the collision mean `X̄` over `n` batches and
/// compares `X̄ − 1/d` with `ε²/(2d)`, the squared Hilbert–Schmidt radius
/// `ε/√d` halved. The verdict is the majority over `reps` repetitions and
/// the reported statistic is their median. `t` is clamped to `d²`.
pub fn mixedness_test(
    rho: &DensityMatrix,
    eps: f64,
    t: usize,
    n: usize,
    reps: usize,
    rng: &mut Rng,
    caps: &Caps,
) -> Result<TesterVerdict> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(QcError::InvalidParameter(format!("eps must lie in (0, 2], got {eps}")));
    }
    if t == 0 || n < 2 || reps == 0 {
        return Err(QcError::InvalidParameter(format!("need t >= 1, n >= 2, reps >= 1 (t={t}, n={n}, reps={reps})")));
    }
    let d = rho.dim();
    let source = ptsw_source(rho, t.min(d * d), caps)?;
    mixedness_test_with(source.as_ref(), eps, n, reps, rng)
}

/// [`mixedness_test`] with a prebuilt estimator on copies of ρ.
pub fn mixedness_test_with(
    source: &dyn StateEstimator,
    eps: f64,
    n: usize,
    reps: usize,
    rng: &mut Rng,
) -> Result<TesterVerdict> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(QcError::InvalidParameter(format!("eps must lie in (0, 2], got {eps}")));
    }
    if n < 2 || reps == 0 {
        return Err(QcError::InvalidParameter(format!("need n >= 2 and reps >= 1 (n={n}, reps={reps})")));
    }
    let d = source.dim();
    let t = source.copies_per_estimate();
    let threshold = eps * eps / (2.0 * d as f64);
    let mut raw = Vec::with_capacity(reps);
    for _ in 0..reps {
        let estimates = (0..n).map(|_| source.estimate(rng)).collect::<Result<Vec<_>>>()?;
        raw.push(collision_mean(&estimates)?);
    }
    let accepts = raw.iter().filter(|&&x| x - 1.0 / (d as f64) < threshold).count();
    let raw_median = super::median(&raw);
    Ok(TesterVerdict {
        accept: 2 * accepts > reps,
        statistic: raw_median - 1.0 / d as f64,
        raw_statistic: raw_median,
        threshold,
        copies_used: reps * n * t,
        n_batches: reps * n,
        t,
    })
}
