//! Testing protocols built on the estimators: collision purity and
//! Hilbert–Schmidt distance estimates, mixedness and closeness tests,
//! bucketed certification of a known state and the batched BOW tester.

mod bow;
mod bucket;
mod certify;
mod closeness;
mod collision;
mod mixedness;

pub use bow::{bow_batched_test, swap_test, swap_test_probability, BowEstimator};
pub use bucket::{bucket_plan, Bucket, BucketPlan, RadiusConstants};
pub use certify::{certify, CertifyParams, CertifyReport, Certifier, SubTestKind, SubTestRecord};
pub use closeness::{closeness_test_tcopy, closeness_test_uniform};
pub use collision::{collision_mean, hs_distance_estimate, purity_estimate, EstimatorMoments};
pub use mixedness::{mixedness_test, mixedness_test_with};

use serde::{Deserialize, Serialize};

/// Decision of a tester together with the statistic it thresholded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesterVerdict {
    pub accept: bool,
    pub statistic: f64,
    /// The statistic before any centering; equal to `statistic` for
    /// protocols that do not center.
    pub raw_statistic: f64,
    pub threshold: f64,
    pub copies_used: usize,
    pub n_batches: usize,
    pub t: usize,
}

/// Collision mean `X̄` with its copy accounting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub statistic: f64,
    pub copies_used: usize,
    pub n_batches: usize,
    pub t: usize,
}

/// Median of a non-empty slice (mean of the middle pair for even length).
pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}
