use crate::error::Result;
use crate::qcore::{eye, gell_mann_basis, kron, partial_trace, swap, trace_product, CMat, C64};
use nalgebra::DMatrix;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// One- and two-register marginals of an `n`-register operator on `C^D`.
/// The two-register marginal is zero when `n < 2`.
pub fn register_marginals(psi: &CMat, big_d: usize, n: usize) -> Result<(CMat, CMat)> {
    let dims = vec![big_d; n];
    let m1 = partial_trace(psi, &dims, &[0])?;
    let m12 = if n >= 2 { partial_trace(psi, &dims, &[0, 1])? } else { CMat::zeros(big_d * big_d, big_d * big_d) };
    Ok((m1, m12))
}

/// `E[|ψ⟩⟨ψ|] = (ρ + I)/(d + 1)` for the uniform POVM.
pub fn uniform_first_moment(rho: &CMat) -> CMat {
    let d = rho.nrows();
    (rho + eye(d)) / c((d + 1) as f64)
}

/// `E[|ψ⟩⟨ψ|^{⊗2}]` for the uniform POVM.
pub fn uniform_second_moment(rho: &CMat) -> CMat {
    let d = rho.nrows();
    let i = eye(d);
    let sw = swap(d);
    let sym = kron(rho, &i) + kron(&i, rho);
    (eye(d * d) + &sw + &sym + &sym * &sw) / c(((d + 1) * (d + 2)) as f64)
}

/// `E[|ψ⟩⟨ψ|] = I/(D+n) + n/(D+n) (ψ)_1` for the Hayashi measurement.
pub fn hayashi_first_moment(m1: &CMat, n: usize) -> CMat {
    let big_d = m1.nrows();
    (eye(big_d) + m1 * c(n as f64)) / c((big_d + n) as f64)
}

/// `E[|ψ⟩⟨ψ|^{⊗2}]` for the Hayashi measurement, from the marginals.
pub fn hayashi_second_moment(m1: &CMat, m12: &CMat, n: usize) -> CMat {
    let big_d = m1.nrows();
    let i = eye(big_d);
    let ii = eye(big_d * big_d);
    let sw = swap(big_d);
    let sym = kron(m1, &i) + kron(&i, m1);
    let nf = n as f64;
    let num = &ii + &sw + &sym * (&ii + &sw) * c(nf) + m12 * c(nf * (nf - 1.0));
    num / c(((big_d + n) * (big_d + n + 1)) as f64)
}

/// `E[σ̂ ⊗ σ̂]` for the GPS estimator `σ̂ = (D+n)/n |ψ⟩⟨ψ| − I/n`.
pub fn gps_second_moment(m1: &CMat, m12: &CMat, n: usize) -> CMat {
    let big_d = m1.nrows();
    let (nf, df) = (n as f64, big_d as f64);
    let i = eye(big_d);
    let ii = eye(big_d * big_d);
    let sw = swap(big_d);
    let sym = kron(m1, &i) + kron(&i, m1);
    let r = (df + nf) / (df + nf + 1.0);
    m12 * c((nf - 1.0) / nf * r) + &sym * &sw * c(r / nf) - &sym * c(1.0 / (nf * (df + nf + 1.0)))
        + &sw * c(r / (nf * nf))
        - ii * c(1.0 / (nf * nf * (df + nf + 1.0)))
}

/// Three-term upper form `((n−1)/n)(ψ)_{12} + (1/n)((ψ)_1⊗I + I⊗(ψ)_1)·SWAP + SWAP/n²`.
pub fn gps_truncated(m1: &CMat, m12: &CMat, n: usize) -> CMat {
    let big_d = m1.nrows();
    let nf = n as f64;
    let i = eye(big_d);
    let sw = swap(big_d);
    let sym = kron(m1, &i) + kron(&i, m1);
    m12 * c((nf - 1.0) / nf) + &sym * &sw * c(1.0 / nf) + sw * c(1.0 / (nf * nf))
}

/// Remainder `truncated − E[σ̂⊗σ̂]`, reconstructed term by term:
/// `[((n−1)/n)(ψ)_{12} + (1/n)S·SWAP + (1/n)S + SWAP/n² + I/n²]/(D+n+1)`
/// with `S = (ψ)_1⊗I + I⊗(ψ)_1`.
pub fn gps_lower(m1: &CMat, m12: &CMat, n: usize) -> CMat {
    let big_d = m1.nrows();
    let nf = n as f64;
    let i = eye(big_d);
    let ii = eye(big_d * big_d);
    let sw = swap(big_d);
    let sym = kron(m1, &i) + kron(&i, m1);
    let inner = m12 * c((nf - 1.0) / nf) + &sym * &sw * c(1.0 / nf) + &sym * c(1.0 / nf) + sw * c(1.0 / (nf * nf))
        + ii * c(1.0 / (nf * nf));
    inner / c(big_d as f64 + nf + 1.0)
}

/// Coefficients `C_ab = tr(M (G_a ⊗ G_b))` of `M` in the Gell-Mann product
/// basis. `M` is a non-negative combination of `X ⊗ X` with Hermitian `X`
/// exactly when `C` is real, symmetric and positive semidefinite.
pub fn sos_coefficients(m: &CMat, d: usize) -> DMatrix<C64> {
    let basis = gell_mann_basis(d);
    let k = basis.len();
    DMatrix::from_fn(k, k, |a, b| trace_product(m, &kron(&basis[a], &basis[b])))
}

/// Sum-of-squares membership test with tolerance `tol`.
pub fn is_sos(m: &CMat, d: usize, tol: f64) -> bool {
    let cm = sos_coefficients(m, d);
    if cm.iter().any(|z| z.im.abs() > tol) {
        return false;
    }
    let re = cm.map(|z| z.re);
    if (&re - re.transpose()).amax() > tol {
        return false;
    }
    crate::qcore::eigh_real(&re).0.iter().all(|&l| l >= -tol)
}

/// Closed-form `E[ρ̂ ⊗ ρ̂ | λ]` for PTSW given the system marginals
/// `(τ)_{A1}` and `(τ)_{A1A2}` of the purified block state, with purifying
/// dimension `ell`, total local dimension `D = d·ell` and `t` copies.
pub fn ptsw_conditional_second_moment(tau_a1: &CMat, tau_a12: &CMat, ell: usize, t: usize) -> CMat {
    let d = tau_a1.nrows();
    let big_d = (d * ell) as f64;
    let (tf, lf) = (t as f64, ell as f64);
    let i = eye(d);
    let ii = eye(d * d);
    let sw = swap(d);
    let sym = kron(tau_a1, &i) + kron(&i, tau_a1);
    let r = (big_d + tf) / (big_d + tf + 1.0);
    tau_a12 * c((tf - 1.0) / tf * r) + &sym * &sw * c(r / tf) - &sym * c(lf / (tf * (big_d + tf + 1.0)))
        + sw * c(lf / (tf * tf) * r)
        - ii * c(lf * lf / (tf * tf * (big_d + tf + 1.0)))
}
