use super::{hs_distance_estimate, TesterVerdict};
use crate::error::Result;
use crate::error::QcError;
use crate::estimators::{StateEstimator, UniformPovm};
use crate::qcore::DensityMatrix;
use crate::rng::Rng;

/// Closeness test with single-copy uniform-POVM outcomes.
///
/// The collision mean of `|ψ_i⟩⟨ψ_i| − |φ_i⟩⟨φ_i|` has expectation
/// `‖ρ − σ‖₂²/(d+1)²`; the test accepts iff it is below
/// `ε_hs²/(2(d+1)²)`.
pub fn closeness_test_uniform(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eps_hs: f64,
    n: usize,
    rng: &mut Rng,
) -> Result<TesterVerdict> {
    let a = UniformPovm::new(rho);
    let b = UniformPovm::new(sigma);
    let report = hs_distance_estimate(&a, &b, n, rng)?;
    let d1 = (rho.dim() + 1) as f64;
    let threshold = eps_hs * eps_hs / (2.0 * d1 * d1);
    Ok(TesterVerdict {
        accept: report.statistic < threshold,
        statistic: report.statistic,
        raw_statistic: report.statistic,
        threshold,
        copies_used: report.copies_used,
        n_batches: n,
        t: 1,
    })
}

/// Closeness test with `t`-copy estimators on both sides.
///
/// The collision mean of `ρ̂_i − σ̂_i` is unbiased for `‖ρ − σ‖₂²` when both
/// sources are unbiased; the test accepts iff it is below `ε_hs²/2`.
pub fn closeness_test_tcopy(
    rho: &dyn StateEstimator,
    sigma: &dyn StateEstimator,
    eps_hs: f64,
    n: usize,
    rng: &mut Rng,
) -> Result<TesterVerdict> {
    if rho.copies_per_estimate() != sigma.copies_per_estimate() {
        return Err(QcError::InvalidParameter(format!(
            "sources use {} and {} copies per estimate",
            rho.copies_per_estimate(),
            sigma.copies_per_estimate()
        )));
    }
    let report = hs_distance_estimate(rho, sigma, n, rng)?;
    let threshold = eps_hs * eps_hs / 2.0;
    Ok(TesterVerdict {
        accept: report.statistic < threshold,
        statistic: report.statistic,
        raw_statistic: report.statistic,
        threshold,
        copies_used: report.copies_used,
        n_batches: n,
        t: report.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_accounting_and_threshold() {
        let rho = DensityMatrix::maximally_mixed(2);
        let mut rng = crate::rng::stream(2, "closeness", 0);
        let v = closeness_test_uniform(&rho, &rho, 0.5, 10, &mut rng).unwrap();
        assert_eq!(v.copies_used, 20);
        assert!((v.threshold - 0.25 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn tcopy_separates_far_states() {
        let caps = crate::qcore::Caps::default();
        let sigma = DensityMatrix::maximally_mixed(2);
        let far = DensityMatrix::from_diag(&[0.9, 0.1]).unwrap();
        let a = crate::estimators::ptsw_source(&far, 2, &caps).unwrap();
        let b = crate::estimators::ptsw_source(&sigma, 2, &caps).unwrap();
        let mut rng = crate::rng::stream(2, "closeness", 1);
        let v = closeness_test_tcopy(a.as_ref(), b.as_ref(), 0.5, 400, &mut rng).unwrap();
        assert_eq!(v.copies_used, 1600);
        assert!(!v.accept, "statistic {}", v.statistic);
    }
}
