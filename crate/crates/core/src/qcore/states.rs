use super::{eigh, is_hermitian, CMat, CVec, C64};
use crate::error::{QcError, Result};

const STATE_TOL: f64 = 1e-9;

/// Unit-trace positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    pub fn new(mat: CMat) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 {
            return Err(QcError::Shape(format!("density matrix must be square, got {:?}", mat.shape())));
        }
        if !is_hermitian(&mat, STATE_TOL) {
            return Err(QcError::InvalidParameter("density matrix is not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(QcError::InvalidParameter(format!("density matrix trace {tr} is not 1")));
        }
        let (w, _) = eigh(&mat);
        if w[0] < -STATE_TOL {
            return Err(QcError::InvalidParameter(format!("density matrix has eigenvalue {}", w[0])));
        }
        Ok(DensityMatrix { mat: super::hermitize(&mat) })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix { mat: super::eye(d) / C64::new(d as f64, 0.0) }
    }

    pub fn from_diag(p: &[f64]) -> Result<Self> {
        Self::new(super::diag(p))
    }

    pub fn pure(psi: &PureState) -> Self {
        DensityMatrix { mat: super::outer(&psi.amps, &psi.amps) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        super::trace_product(&self.mat, &self.mat).re
    }

    /// Eigenvalues clipped at zero, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        eigh(&self.mat).0.into_iter().map(|x| x.max(0.0)).collect()
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.spectrum().iter().filter(|&&x| x > tol).count()
    }
}

/// Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp {
    mat: CMat,
}

impl HermitianOp {
    pub fn new(mat: CMat) -> Result<Self> {
        if !is_hermitian(&mat, STATE_TOL) {
            return Err(QcError::InvalidParameter("operator is not Hermitian".into()));
        }
        Ok(HermitianOp { mat: super::hermitize(&mat) })
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}

/// Normalised state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    pub amps: CVec,
}

impl PureState {
    pub fn new(amps: CVec) -> Result<Self> {
        let n = amps.norm();
        if (n - 1.0).abs() > STATE_TOL {
            return Err(QcError::InvalidParameter(format!("state norm {n} is not 1")));
        }
        Ok(PureState { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::diag;

    #[test]
    fn rejects_invalid_states() {
        assert!(DensityMatrix::new(diag(&[0.5, 0.4])).is_err());
        assert!(DensityMatrix::new(diag(&[1.2, -0.2])).is_err());
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::from_diag(&[0.9, 0.1]).is_ok());
    }

    #[test]
    fn maximally_mixed_purity() {
        assert!((DensityMatrix::maximally_mixed(4).purity() - 0.25).abs() < 1e-15);
    }
}
