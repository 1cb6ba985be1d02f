use crate::error::{QcError, Result};
use crate::qcore::{eye, ginibre, max_abs_diff, outer, tensor_power, CMat, CVec, DensityMatrix, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};

const COMPLETENESS_TOL: f64 = 1e-9;

/// POVM with rank-one elements `M_x = |ψ_x⟩⟨ψ_x|` (unnormalised vectors).
#[derive(Clone, Debug)]
pub struct RankOnePovm {
    dim: usize,
    vectors: Vec<CVec>,
}

impl RankOnePovm {
    /// Validates `Σ_x |ψ_x⟩⟨ψ_x| = I`.
    pub fn new(vectors: Vec<CVec>) -> Result<Self> {
        let dim = vectors.first().map(|v| v.len()).ok_or_else(|| QcError::InvalidParameter("empty POVM".into()))?;
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(QcError::Shape("POVM vectors of different lengths".into()));
        }
        let mut sum = CMat::zeros(dim, dim);
        for v in &vectors {
            sum += outer(v, v);
        }
        let err = max_abs_diff(&sum, &eye(dim));
        if err > COMPLETENESS_TOL {
            return Err(QcError::InvalidParameter(format!("POVM elements miss the identity by {err:.3e}")));
        }
        Ok(RankOnePovm { dim, vectors })
    }

    /// Rows of an isometry `W` (`k × D`, `W†W = I`) as conjugated vectors.
    pub fn from_isometry(w: &CMat) -> Result<Self> {
        let vectors = (0..w.nrows()).map(|x| w.row(x).adjoint()).collect();
        Self::new(vectors)
    }

    /// Measurement in the computational basis of `C^dim`.
    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| {
                let mut v = CVec::zeros(dim);
                v[i] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        RankOnePovm { dim, vectors }
    }

    /// Random rank-one POVM with `outcomes ≥ dim` elements from the rows of
    /// a Haar-random isometry.
    pub fn random<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Result<Self> {
        if outcomes < dim {
            return Err(QcError::InvalidParameter(format!("{outcomes} outcomes cannot resolve dimension {dim}")));
        }
        let q = ginibre(outcomes, dim, rng).qr().q();
        Self::from_isometry(&q)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    /// `M_x`.
    pub fn element(&self, x: usize) -> CMat {
        outer(&self.vectors[x], &self.vectors[x])
    }

    /// `tr(M_x A)` for every outcome.
    pub fn probabilities_of(&self, a: &CMat) -> Vec<f64> {
        self.vectors.iter().map(|v| (v.adjoint() * a * v)[(0, 0)].re).collect()
    }

    pub fn to_json(&self) -> PovmJson {
        PovmJson {
            dim: self.dim,
            vectors: self.vectors.iter().map(|v| v.iter().flat_map(|z| [z.re, z.im]).collect()).collect(),
        }
    }

    pub fn from_json(j: &PovmJson) -> Result<Self> {
        let vectors = j
            .vectors
            .iter()
            .map(|v| {
                if v.len() != 2 * j.dim {
                    return Err(QcError::Shape(format!("POVM vector of length {} for dim {}", v.len() / 2, j.dim)));
                }
                Ok(CVec::from_fn(j.dim, |i, _| C64::new(v[2 * i], v[2 * i + 1])))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vectors)
    }
}

/// Serialised POVM: vectors with interleaved real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

/// `p(x) = tr(M_x ρ^{⊗t})`.
pub fn outcome_distribution(povm: &RankOnePovm, rho: &DensityMatrix, t: usize) -> Result<Vec<f64>> {
    let pow = tensor_power(rho.mat(), t);
    if pow.nrows() != povm.dim() {
        return Err(QcError::Shape(format!("POVM on dimension {} applied to {}^{t}", povm.dim(), rho.dim())));
    }
    Ok(povm.probabilities_of(&pow))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random_density;

    #[test]
    fn random_povm_is_complete() {
        let mut rng = crate::rng::stream(1, "povm", 0);
        let p = RankOnePovm::random(4, 7, &mut rng).unwrap();
        assert_eq!(p.outcomes(), 7);
        let back = RankOnePovm::from_json(&p.to_json()).unwrap();
        assert_eq!(back.outcomes(), 7);
    }

    #[test]
    fn rejects_incomplete_sets() {
        let mut v = RankOnePovm::computational(3).vectors;
        v.pop();
        assert!(matches!(RankOnePovm::new(v), Err(QcError::InvalidParameter(_))));
    }

    #[test]
    fn distributions() {
        let mut rng = crate::rng::stream(1, "povm", 1);
        let rho = random_density(2, 2, &mut rng).unwrap();
        let p = outcome_distribution(&RankOnePovm::computational(2), &rho, 1).unwrap();
        assert!((p[0] - rho.mat()[(0, 0)].re).abs() < 1e-15);
        let povm = RankOnePovm::random(4, 6, &mut rng).unwrap();
        let p = outcome_distribution(&povm, &rho, 2).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(p.iter().all(|&x| x >= -1e-15));
        let mm = outcome_distribution(&povm, &DensityMatrix::maximally_mixed(2), 2).unwrap();
        for (x, v) in povm.vectors().iter().enumerate() {
            assert!((mm[x] - v.norm_squared() / 4.0).abs() < 1e-14);
        }
    }
}
