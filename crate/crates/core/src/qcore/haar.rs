use super::{states::DensityMatrix, CMat, CVec, C64};
use crate::error::{QcError, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Standard complex Gaussian with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unit vector in `C^d`.
pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    loop {
        let v = CVec::from_fn(d, |_, _| complex_gaussian(rng));
        let n = v.norm();
        if n > 1e-300 {
            return v / C64::new(n, 0.0);
        }
    }
}

/// Haar-random unitary via QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Random density matrix of the given rank from the induced (Ginibre)
/// measure.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(QcError::InvalidParameter(format!("rank {rank} invalid for dimension {d}")));
    }
    let g = ginibre(d, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m / C64::new(tr, 0.0))
}
