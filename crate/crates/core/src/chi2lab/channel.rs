use super::RankOnePovm;
use crate::error::{QcError, Result};
use crate::qcore::{
    eigh_real, eye, kron_all, partial_trace, trace_product, unvec_row_major, vec_row_major, Caps, CMat, C64,
};
use nalgebra::DMatrix;

/// Linear map on `d × d` matrices through its Liouville matrix,
/// `vec(Φ(X)) = S_Φ vec(X)` with row-major `vec`.
#[derive(Clone, Debug)]
pub struct Superoperator {
    dim: usize,
    liouville: CMat,
}

impl Superoperator {
    pub fn new(dim: usize, liouville: CMat) -> Result<Self> {
        if liouville.shape() != (dim * dim, dim * dim) {
            return Err(QcError::Shape(format!("Liouville matrix {:?} for operator dimension {dim}", liouville.shape())));
        }
        Ok(Superoperator { dim, liouville })
    }

    /// Liouville matrix of `f`, column by column from the matrix units.
    pub fn from_map(dim: usize, f: impl Fn(&CMat) -> Result<CMat>) -> Result<Self> {
        let n = dim * dim;
        let mut s = CMat::zeros(n, n);
        for k in 0..n {
            let mut e = CMat::zeros(dim, dim);
            e[(k / dim, k % dim)] = C64::new(1.0, 0.0);
            let col = vec_row_major(&f(&e)?);
            s.set_column(k, &col);
        }
        Self::new(dim, s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn liouville(&self) -> &CMat {
        &self.liouville
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        unvec_row_major(&(&self.liouville * vec_row_major(x)), self.dim, self.dim)
    }

    pub fn trace(&self) -> f64 {
        self.liouville.trace().re
    }

    /// Matrix `R_ab = tr(G_a Φ(G_b))` in an orthonormal Hermitian basis.
    /// Real symmetric when Φ is self-adjoint and Hermiticity preserving.
    pub fn in_basis(&self, basis: &[CMat]) -> DMatrix<f64> {
        let images: Vec<CMat> = basis.iter().map(|g| self.apply(g)).collect();
        DMatrix::from_fn(basis.len(), basis.len(), |a, b| trace_product(&basis[a], &images[b]).re)
    }

    /// Spectrum of the self-adjoint part, ascending. Lüders and induced
    /// channels are self-adjoint, so this is their spectrum.
    pub fn spectrum(&self) -> Vec<f64> {
        let basis = crate::qcore::gell_mann_basis(self.dim);
        eigh_real(&self.in_basis(&basis)).0
    }

    /// `max |Φ(I) − I|`.
    pub fn unitality_error(&self) -> f64 {
        crate::qcore::max_abs_diff(&self.apply(&eye(self.dim)), &eye(self.dim))
    }
}

/// Lüders channel `H(X) = Σ_x tr(M_x X) M_x / tr(M_x)` of a rank-one POVM,
/// i.e. `S_H = Σ_x vec(M̂_x) vec(M_x)†`.
pub fn lueders_channel(povm: &RankOnePovm) -> Result<Superoperator> {
    let dim = povm.dim();
    let n = dim * dim;
    let mut s = CMat::zeros(n, n);
    for x in 0..povm.outcomes() {
        let m = povm.element(x);
        let tr = m.trace().re;
        if tr <= 0.0 {
            continue;
        }
        let v = vec_row_major(&m);
        s += &v * v.adjoint() / C64::new(tr, 0.0);
    }
    Superoperator::new(dim, s)
}

/// Single-register induced channel `H̃ = (1/t²) Σ_{j,k} H̃_{j,k}`, with
/// `H̃_{j,k}(M) = tr_{[t]∖{j}} H(M at register k ⊗ (I/d) elsewhere)`.
pub fn induced_channel(h: &Superoperator, d: usize, t: usize, caps: &Caps) -> Result<Superoperator> {
    let big = caps.check_dim("d^t", d, t)?;
    if h.dim() != big {
        return Err(QcError::Shape(format!("channel on dimension {} is not on ({d})^{t}", h.dim())));
    }
    let mm = eye(d) / C64::new(d as f64, 0.0);
    let dims = vec![d; t];
    Superoperator::from_map(d, |m| {
        let mut acc = CMat::zeros(d, d);
        for k in 0..t {
            let factors: Vec<&CMat> = (0..t).map(|r| if r == k { m } else { &mm }).collect();
            let out = h.apply(&kron_all(&factors));
            for j in 0..t {
                acc += partial_trace(&out, &dims, &[j])?;
            }
        }
        Ok(acc / C64::new((t * t) as f64, 0.0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{max_abs_diff, random_density};

    #[test]
    fn computational_basis_dephasing() {
        let h = lueders_channel(&RankOnePovm::computational(3)).unwrap();
        let spec = h.spectrum();
        assert_eq!(spec.iter().filter(|&&x| (x - 1.0).abs() < 1e-12).count(), 3);
        assert_eq!(spec.iter().filter(|&&x| x.abs() < 1e-12).count(), 6);
        assert!((h.trace() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lueders_axioms() {
        let mut rng = crate::rng::stream(2, "channel", 0);
        for _ in 0..10 {
            let povm = RankOnePovm::random(4, 6, &mut rng).unwrap();
            let h = lueders_channel(&povm).unwrap();
            assert!(h.unitality_error() < 1e-10);
            assert!((h.trace() - 4.0).abs() < 1e-8);
            let s = h.spectrum();
            assert!(s[0] > -1e-9 && s[s.len() - 1] < 1.0 + 1e-9);
            // Direct action matches measure-and-prepare.
            let rho = random_density(4, 4, &mut rng).unwrap();
            let p = povm.probabilities_of(rho.mat());
            let mut direct = CMat::zeros(4, 4);
            for (x, px) in p.iter().enumerate() {
                let m = povm.element(x);
                direct += &m * C64::new(px / m.trace().re, 0.0);
            }
            assert!(max_abs_diff(&direct, &h.apply(rho.mat())) < 1e-12);
        }
    }

    #[test]
    fn induced_channel_single_register_is_identity_map() {
        let mut rng = crate::rng::stream(2, "channel", 1);
        let h = lueders_channel(&RankOnePovm::random(3, 5, &mut rng).unwrap()).unwrap();
        let ind = induced_channel(&h, 3, 1, &Caps::default()).unwrap();
        assert!(max_abs_diff(ind.liouville(), h.liouville()) < 1e-14);
    }

    #[test]
    fn induced_channel_axioms() {
        let mut rng = crate::rng::stream(2, "channel", 2);
        for _ in 0..10 {
            let h = lueders_channel(&RankOnePovm::random(4, 8, &mut rng).unwrap()).unwrap();
            let ind = induced_channel(&h, 2, 2, &Caps::default()).unwrap();
            assert!(ind.unitality_error() < 1e-9);
            assert!(ind.trace() <= 2.0 + 1e-8);
            assert!(*ind.spectrum().last().unwrap() <= 1.0 + 1e-9);
        }
    }
}
