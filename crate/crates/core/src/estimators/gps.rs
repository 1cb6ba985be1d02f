use crate::qcore::{eye, outer, CMat, CVec, C64};

/// Debiased estimate `σ̂ = (D+n)/n |ψ⟩⟨ψ| − I/n` from a Hayashi outcome on
/// `n` copies; unbiased for the single-register marginal.
pub fn gps_estimate(psi: &CVec, n: usize) -> CMat {
    let big_d = psi.len();
    let nf = n as f64;
    outer(psi, psi) * C64::new((big_d as f64 + nf) / nf, 0.0) - eye(big_d) / C64::new(nf, 0.0)
}
