use crate::error::{QcError, Result};
use crate::qcore::{
    all_permutations, apply_perm_left, basis_map, factorial, is_hermitian, psd_factor, sym_dim,
    Caps, CMat, C64,
};

/// `Π_sym L` for the columns of `L`, each a vector on `(C^D)^{⊗n}`.
pub fn symmetrize_columns(l: &CMat, big_d: usize, n: usize) -> CMat {
    let mut out = CMat::zeros(l.nrows(), l.ncols());
    let w = C64::new(1.0 / factorial(n) as f64, 0.0);
    for perm in all_permutations(n) {
        apply_perm_left(&basis_map(&perm, big_d), l, w, &mut out);
    }
    out
}

/// Exact `k`-th moment `E[|ψ⟩⟨ψ|^{⊗k}]` of the outcome of the Hayashi
/// measurement on a state supported on the symmetric subspace of
/// `(C^D)^{⊗n}`:
/// `D[n] · tr_{1..n}( Π_sym^{(n+k)} (ψ_sym ⊗ I^{⊗k}) ) / D[n+k]`.
pub fn haar_moment_oracle(psi_sym: &CMat, big_d: usize, n: usize, k: usize, caps: &Caps) -> Result<CMat> {
    let dim_n = Caps::check_pow("D^n", big_d, n, usize::MAX)?;
    if psi_sym.nrows() != dim_n || !psi_sym.is_square() {
        return Err(QcError::Shape(format!("state has shape {:?}, expected {dim_n}x{dim_n}", psi_sym.shape())));
    }
    if !is_hermitian(psi_sym, 1e-9) || (psi_sym.trace().re - 1.0).abs() > 1e-9 {
        return Err(QcError::Precondition("input is not a unit-trace Hermitian operator".into()));
    }
    caps.check_oracle("D^(n+k)", big_d, n + k)?;
    let factor = psd_factor(psi_sym, 1e-15);
    let recon = &factor * factor.adjoint();
    if crate::qcore::max_abs_diff(&recon, psi_sym) > 1e-8 {
        return Err(QcError::Precondition("input is not positive semidefinite".into()));
    }
    haar_moment_oracle_factor(&factor, big_d, n, k, caps)
}

/// Same as [`haar_moment_oracle`] for `ψ_sym = L L†` given the factor `L`.
pub fn haar_moment_oracle_factor(l: &CMat, big_d: usize, n: usize, k: usize, caps: &Caps) -> Result<CMat> {
    let total = caps.check_oracle("D^(n+k)", big_d, n + k)?;
    let dim_n = big_d.pow(n as u32);
    let dim_k = big_d.pow(k as u32);
    if l.nrows() != dim_n {
        return Err(QcError::Shape(format!("factor has {} rows, expected {dim_n}", l.nrows())));
    }
    let sym = symmetrize_columns(l, big_d, n);
    let dev = crate::qcore::max_abs_diff(&sym, l);
    if dev > 1e-8 {
        return Err(QcError::Precondition(format!("state leaves the symmetric subspace (deviation {dev:.2e})")));
    }
    let mut acc = CMat::zeros(dim_k, dim_k);
    for perm in all_permutations(n + k) {
        let map = basis_map(&perm, big_d);
        debug_assert_eq!(map.len(), total);
        // [V(π)(ψ ⊗ I)]_{(i,a),(i,b)} collects ψ_{j,i} whenever V(π) sends (j,b) to (i,a).
        for b in 0..dim_k {
            for j in 0..dim_n {
                let out = map[j * dim_k + b];
                let (i, a) = (out / dim_k, out % dim_k);
                let mut s = C64::new(0.0, 0.0);
                for r in 0..l.ncols() {
                    s += l[(j, r)] * l[(i, r)].conj();
                }
                acc[(a, b)] += s;
            }
        }
    }
    let scale = sym_dim(big_d, n) / (sym_dim(big_d, n + k) * factorial(n + k) as f64);
    Ok(acc * C64::new(scale, 0.0))
}
