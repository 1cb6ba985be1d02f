//! Fixed null/alternative state pairs used by the experiment runner.

use crate::error::{QcError, Result};
use crate::qcore::{DensityMatrix, C64};

/// `diag(1/2, 1/4, …, 2^{-(d-1)}, 2^{-(d-1)})`; for `d = 4` this is
/// `diag(1/2, 1/4, 1/8, 1/8)`.
pub fn reference_state(d: usize) -> Result<DensityMatrix> {
    let mut p: Vec<f64> = (0..d).map(|i| 0.5f64.powi(i as i32 + 1)).collect();
    p[d - 1] = 0.5f64.powi(d as i32 - 1);
    DensityMatrix::from_diag(&p)
}

/// Diagonal state at trace distance `min(1, ε + 0.2)` from `I/d`, shifting
/// weight `±δ` between the first and last `⌊d/2⌋` levels. At `d = 2`,
/// `ε = 0.6` this is `diag(0.9, 0.1)`.
pub fn far_from_mixed(d: usize, eps: f64) -> Result<DensityMatrix> {
    let pairs = d / 2;
    let delta = (1.0 / d as f64).min((eps + 0.2) / (2 * pairs) as f64);
    let mut p = vec![1.0 / d as f64; d];
    for i in 0..pairs {
        p[i] += delta;
        p[d - 1 - i] -= delta;
    }
    let p: Vec<f64> = p.into_iter().map(|x| x.max(0.0)).collect();
    DensityMatrix::from_diag(&p)
}

/// `σ + κ(|0⟩⟨1| + |1⟩⟨0|)` with `κ = ε/2`, at trace distance `ε` from `σ`.
pub fn planted_coherence(sigma: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    let kappa = eps / 2.0;
    let mut m = sigma.mat().clone();
    let bound = (m[(0, 0)].re * m[(1, 1)].re).sqrt();
    if kappa > bound {
        return Err(QcError::InvalidParameter(format!(
            "coherence {kappa} exceeds sqrt(sigma_00 sigma_11) = {bound}; eps too large for this d"
        )));
    }
    m[(0, 1)] += C64::new(kappa, 0.0);
    m[(1, 0)] += C64::new(kappa, 0.0);
    DensityMatrix::new(m)
}

/// `I/d + (ε/√2)(|0⟩⟨0| − |1⟩⟨1|)`, at Hilbert–Schmidt distance `ε` from
/// `I/d`.
pub fn hs_shifted(d: usize, eps_hs: f64) -> Result<DensityMatrix> {
    let delta = eps_hs / 2f64.sqrt();
    if delta > 1.0 / d as f64 {
        return Err(QcError::InvalidParameter(format!(
            "Hilbert-Schmidt radius {eps_hs} is unreachable by a diagonal shift at d = {d}"
        )));
    }
    let mut p = vec![1.0 / d as f64; d];
    p[0] += delta;
    p[1] -= delta;
    DensityMatrix::from_diag(&p)
}
