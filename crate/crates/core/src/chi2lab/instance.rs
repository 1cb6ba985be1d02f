use super::Superoperator;
use crate::error::{QcError, Result};
use crate::qcore::{
    eigh_real, eye, gell_mann_basis, op_norm, trace_norm, trace_product, vec_row_major, CMat, DensityMatrix,
    C64,
};

const BASIS_TOL: f64 = 1e-10;

/// Rademacher perturbations `ρ_z = I/d + a_z Δ_z` of the maximally mixed
/// state, `Δ_z = (cε/√(dℓ)) Σ_{i≤ℓ} z_i V_i`, `a_z = min{1, 1/(d‖Δ_z‖_op)}`.
#[derive(Clone, Debug)]
pub struct HardInstanceEnsemble {
    pub d: usize,
    pub ell: usize,
    pub eps: f64,
    pub c: f64,
    basis: Vec<CMat>,
}

impl HardInstanceEnsemble {
    /// `basis` must be an orthonormal Hermitian basis of `d × d` matrices
    /// ending with `I/√d`.
    pub fn new(d: usize, ell: usize, eps: f64, c: f64, basis: Vec<CMat>) -> Result<Self> {
        if ell == 0 || ell > d * d - 1 {
            return Err(QcError::InvalidParameter(format!("ell = {ell} outside [1, d^2 - 1] for d = {d}")));
        }
        if !(eps >= 0.0) || !(c >= 0.0) {
            return Err(QcError::InvalidParameter(format!("eps = {eps} and c = {c} must be non-negative")));
        }
        check_basis(d, &basis)?;
        Ok(HardInstanceEnsemble { d, ell, eps, c, basis })
    }

    pub fn gell_mann(d: usize, ell: usize, eps: f64, c: f64) -> Result<Self> {
        Self::new(d, ell, eps, c, gell_mann_basis(d))
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// `𝒱 = [vec(V_1), …, vec(V_ℓ)]`.
    pub fn frame(&self) -> CMat {
        let n = self.d * self.d;
        let mut v = CMat::zeros(n, self.ell);
        for (i, b) in self.basis.iter().take(self.ell).enumerate() {
            v.set_column(i, &vec_row_major(b));
        }
        v
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        HardInstanceEnsemble { eps, ..self.clone() }
    }

    /// Number of sign vectors, `2^ℓ`.
    pub fn size(&self) -> usize {
        1usize << self.ell
    }

    /// Sign vector of index `k`: bit `i` set means `z_i = −1`.
    pub fn signs(&self, k: usize) -> Vec<f64> {
        (0..self.ell).map(|i| if k >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()
    }

    /// Unclamped perturbation `Δ_z`.
    pub fn delta(&self, z: &[f64]) -> CMat {
        let scale = self.c * self.eps / ((self.d * self.ell) as f64).sqrt();
        let mut m = CMat::zeros(self.d, self.d);
        for (zi, v) in z.iter().zip(&self.basis) {
            m += v * C64::new(scale * zi, 0.0);
        }
        m
    }

    pub fn clamp(&self, delta: &CMat) -> f64 {
        let n = op_norm(delta);
        if n * self.d as f64 <= 1.0 {
            1.0
        } else {
            1.0 / (self.d as f64 * n)
        }
    }

    /// `Δ̄_z = a_z Δ_z` together with `a_z`.
    pub fn clamped_delta(&self, z: &[f64]) -> (f64, CMat) {
        let delta = self.delta(z);
        let a = self.clamp(&delta);
        (a, delta * C64::new(a, 0.0))
    }

    pub fn state(&self, z: &[f64]) -> Result<DensityMatrix> {
        if z.len() != self.ell {
            return Err(QcError::Shape(format!("sign vector of length {} for ell = {}", z.len(), self.ell)));
        }
        let (_, bar) = self.clamped_delta(z);
        DensityMatrix::new(eye(self.d) / C64::new(self.d as f64, 0.0) + bar)
    }

    /// Fraction of the `2^ℓ` sign vectors with `‖ρ_z − I/d‖₁ ≥ ε`.
    pub fn far_fraction(&self) -> f64 {
        let far = (0..self.size())
            .filter(|&k| trace_norm(&self.clamped_delta(&self.signs(k)).1) >= self.eps)
            .count();
        far as f64 / self.size() as f64
    }
}

fn check_basis(d: usize, basis: &[CMat]) -> Result<()> {
    if basis.len() != d * d || basis.iter().any(|b| b.shape() != (d, d)) {
        return Err(QcError::InvalidParameter(format!("basis must hold {} matrices of size {d}", d * d)));
    }
    for (i, x) in basis.iter().enumerate() {
        if crate::qcore::max_abs_diff(x, &x.adjoint()) > BASIS_TOL {
            return Err(QcError::InvalidParameter(format!("basis element {i} is not Hermitian")));
        }
        for (j, y) in basis.iter().enumerate().skip(i) {
            let ip = trace_product(x, y);
            let expect = if i == j { 1.0 } else { 0.0 };
            if (ip.re - expect).abs() > BASIS_TOL || ip.im.abs() > BASIS_TOL {
                return Err(QcError::InvalidParameter(format!("basis elements {i}, {j} have inner product {ip}")));
            }
        }
    }
    let last = &basis[d * d - 1];
    if crate::qcore::max_abs_diff(last, &(eye(d) / C64::new((d as f64).sqrt(), 0.0))) > BASIS_TOL {
        return Err(QcError::InvalidParameter("last basis element must be I/sqrt(d)".into()));
    }
    Ok(())
}

/// Smallest `c` on the grid `step, 2·step, …` for which at least half of
/// the sign vectors are ε-far in trace norm.
pub fn calibrate_scale(d: usize, ell: usize, eps: f64, step: f64, max_c: f64) -> Result<f64> {
    let mut c = step;
    while c <= max_c + 1e-12 {
        if HardInstanceEnsemble::gell_mann(d, ell, eps, c)?.far_fraction() >= 0.5 {
            return Ok(c);
        }
        c += step;
    }
    Err(QcError::Calibration(format!("no scale up to {max_c} makes half the ensemble {eps}-far")))
}

/// Basis whose first `ℓ` elements are the Hermitian eigenvectors of the
/// induced channel with the smallest eigenvalues, restricted to traceless
/// matrices; `I/√d` is appended last. Ties are ordered by eigenvalue and
/// then lexicographically by the real part of the vectorised eigenvector.
pub fn adversarial_basis(induced: &Superoperator, ell: usize) -> Result<(Vec<CMat>, Vec<f64>)> {
    let d = induced.dim();
    if ell == 0 || ell > d * d - 1 {
        return Err(QcError::InvalidParameter(format!("ell = {ell} outside [1, d^2 - 1]")));
    }
    let gm = gell_mann_basis(d);
    let traceless = &gm[..d * d - 1];
    let r = induced.in_basis(traceless);
    let (vals, vecs) = eigh_real(&r);
    let mut items: Vec<(f64, CMat)> = (0..vals.len())
        .map(|k| {
            let mut m = CMat::zeros(d, d);
            for (a, g) in traceless.iter().enumerate() {
                m += g * C64::new(vecs[(a, k)], 0.0);
            }
            // Fix the sign: first non-negligible real entry positive.
            let v = vec_row_major(&m);
            if let Some(z) = v.iter().find(|z| z.re.abs() > 1e-12) {
                if z.re < 0.0 {
                    m = -m;
                }
            }
            (vals[k], m)
        })
        .collect();
    // Eigenvalues are compared on a 1e-9 grid so near-ties fall through to
    // the lexicographic key.
    items.sort_by(|a, b| {
        let grid = |x: f64| (x * 1e9).round() as i64;
        let key = |m: &CMat| vec_row_major(m).iter().map(|z| z.re).collect::<Vec<_>>();
        grid(a.0).cmp(&grid(b.0)).then_with(|| {
            key(&a.1)
                .iter()
                .zip(key(&b.1))
                .map(|(x, y)| x.total_cmp(&y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let eigenvalues = items.iter().map(|x| x.0).collect();
    let mut basis: Vec<CMat> = items.into_iter().map(|x| x.1).collect();
    basis.push(gm[d * d - 1].clone());
    Ok((basis, eigenvalues))
}

/// `‖𝒱† S 𝒱‖₂` (Frobenius) for the frame of the first `ℓ` basis elements.
pub fn frame_norm(induced: &Superoperator, basis: &[CMat], ell: usize) -> f64 {
    let d = induced.dim();
    let mut v = CMat::zeros(d * d, ell);
    for (i, b) in basis.iter().take(ell).enumerate() {
        v.set_column(i, &vec_row_major(b));
    }
    (v.adjoint() * induced.liouville() * v).norm()
}
