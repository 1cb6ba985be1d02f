//! Dense complex linear algebra, state types and random sampling.

mod basis;
mod caps;
mod haar;
mod linalg;
mod perm;
mod serial;
mod states;

pub use basis::gell_mann_basis;
pub use caps::Caps;
pub use haar::{complex_gaussian, ginibre, haar_state, haar_unitary, random_density};
pub use linalg::{
    eigh, eigh_real, frobenius, hermitize, is_hermitian, kron, kron_all, max_abs_diff, op_norm, outer,
    partial_trace, permute_subsystems, psd_factor, schatten_norm, tensor_power, trace,
    trace_norm, trace_product, unvec_row_major, vec_row_major,
};
pub use perm::{
    all_permutations, apply_perm_left, apply_perm_right, basis_map, cycle_type, factorial,
    permutation_operator, symmetric_projector, Perm,
};
pub use serial::MatrixJson;
pub use states::{DensityMatrix, HermitianOp, PureState};

pub use num_complex::Complex64 as C64;

pub type CMat = nalgebra::DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;

/// Complex identity of size `n`.
pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Complex zero matrix of size `n x n`.
pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Real diagonal matrix.
pub fn diag(vals: &[f64]) -> CMat {
    let n = vals.len();
    let mut m = CMat::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        m[(i, i)] = C64::new(v, 0.0);
    }
    m
}

/// Integer power with overflow detection.
pub fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Binomial coefficient as f64.
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Two-register swap on `C^d ⊗ C^d`.
pub fn swap(d: usize) -> CMat {
    permutation_operator(&[1, 0], d)
}

/// Dimension of the symmetric subspace of `(C^d)^{⊗n}`.
pub fn sym_dim(d: usize, n: usize) -> f64 {
    binom(d + n - 1, n)
}
