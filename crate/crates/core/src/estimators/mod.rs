//! Single-shot state estimators: the uniform POVM, the Hayashi measurement
//! with the debiased GPS estimator, the random purification channel and the
//! t-copy PTSW pipeline, plus closed forms for their first two moments.

mod gps;
mod hayashi;
mod moments;
mod ptsw;
mod purification;
mod reduced;
mod uniform;

pub use gps::gps_estimate;
pub use hayashi::HayashiSampler;
pub use moments::{
    gps_lower, gps_second_moment, gps_truncated, hayashi_first_moment, hayashi_second_moment,
    is_sos, ptsw_conditional_second_moment, register_marginals, sos_coefficients,
    uniform_first_moment, uniform_second_moment,
};
pub use ptsw::{ptsw_estimate, tau_lambda_marginal_check, tau_marginal_reduced, PtswBlock, PtswEstimator};
pub use purification::PurificationChannel;
pub use reduced::PtswReduced;
pub use uniform::UniformPovm;

use crate::error::Result;
use crate::qcore::{Caps, CMat, DensityMatrix};
use crate::rng::Rng;

/// A procedure that consumes copies of an unknown state and returns a
/// matrix-valued estimate.
pub trait StateEstimator: Send + Sync {
    fn dim(&self) -> usize;
    /// Copies of the unknown state consumed per estimate.
    fn copies_per_estimate(&self) -> usize;
    fn estimate(&self, rng: &mut Rng) -> Result<CMat>;
}

/// PTSW estimator for `ρ` on `t` copies, using the dense pipeline when it
/// fits under the dimension cap and the spectral sampler otherwise.
pub fn ptsw_source(rho: &DensityMatrix, t: usize, caps: &Caps) -> Result<Box<dyn StateEstimator>> {
    if PtswEstimator::fits(rho.dim(), t, caps) {
        Ok(Box::new(PtswEstimator::new(rho, t, caps)?))
    } else {
        Ok(Box::new(PtswReduced::new(rho, t)?))
    }
}

/// Estimator that ignores its input and always returns the same matrix.
/// Used for a fully known reference state, which costs no copies.
#[derive(Clone, Debug)]
pub struct FixedEstimate {
    mat: CMat,
    copies: usize,
}

impl FixedEstimate {
    pub fn new(mat: CMat, copies: usize) -> Self {
        FixedEstimate { mat, copies }
    }
}

impl StateEstimator for FixedEstimate {
    fn dim(&self) -> usize {
        self.mat.nrows()
    }

    fn copies_per_estimate(&self) -> usize {
        self.copies
    }

    fn estimate(&self, _rng: &mut Rng) -> Result<CMat> {
        Ok(self.mat.clone())
    }
}
