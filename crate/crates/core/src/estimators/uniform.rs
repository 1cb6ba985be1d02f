use super::StateEstimator;
use crate::error::Result;
use crate::qcore::{complex_gaussian, eigh, outer, CMat, CVec, DensityMatrix, C64};
use crate::rng::Rng;
use crate::rng::categorical as sample_index;
use rand::Rng as _;
use rand_distr::{Beta, Distribution};

/// Uniform (Haar-continuous) POVM `{d·|ψ⟩⟨ψ| dψ}` applied to one copy of `ρ`.
/// The estimate is the raw outcome projector `|ψ⟩⟨ψ|`.
#[derive(Clone, Debug)]
pub struct UniformPovm {
    weights: Vec<f64>,
    vecs: CMat,
}

impl UniformPovm {
    pub fn new(rho: &DensityMatrix) -> Self {
        let (w, v) = eigh(rho.mat());
        UniformPovm { weights: w.into_iter().map(|x| x.max(0.0)).collect(), vecs: v }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// The outcome density against Haar measure is `d⟨ψ|ρ|ψ⟩`, a mixture
    /// over eigenvectors `e_k` of `d|⟨ψ|e_k⟩|²`. Under that tilt the overlap
    /// `|⟨ψ|e_k⟩|²` is Beta(2, d−1) and the orthogonal part stays Haar.
    pub fn sample(&self, rng: &mut Rng) -> Result<CVec> {
        let d = self.dim();
        let k = sample_index(&self.weights, rng)?;
        let ek = self.vecs.column(k).clone_owned();
        if d == 1 {
            return Ok(ek);
        }
        let x: f64 = Beta::new(2.0, (d - 1) as f64).expect("valid beta parameters").sample(rng);
        let phase = C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
        let orth = loop {
            let g = CVec::from_fn(d, |_, _| complex_gaussian(rng));
            let proj = &g - &ek * ek.dotc(&g);
            let n = proj.norm();
            if n > 1e-12 {
                break proj / C64::new(n, 0.0);
            }
        };
        Ok(ek * (phase * x.sqrt()) + orth * C64::new((1.0 - x).sqrt(), 0.0))
    }
}

impl StateEstimator for UniformPovm {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn copies_per_estimate(&self) -> usize {
        1
    }

    fn estimate(&self, rng: &mut Rng) -> Result<CMat> {
        let v = self.sample(rng)?;
        Ok(outer(&v, &v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{uniform_first_moment, uniform_second_moment};
    use crate::qcore::{kron, max_abs_diff};

    #[test]
    fn monte_carlo_moments_match_closed_forms() {
        let rho = DensityMatrix::from_diag(&[0.6, 0.3, 0.1]).unwrap();
        let povm = UniformPovm::new(&rho);
        let mut rng = crate::rng::stream(11, "uniform", 0);
        let n = 40000;
        let mut m1 = CMat::zeros(3, 3);
        let mut m2 = CMat::zeros(9, 9);
        for _ in 0..n {
            let p = povm.estimate(&mut rng).unwrap();
            m2 += kron(&p, &p);
            m1 += p;
        }
        m1 /= C64::new(n as f64, 0.0);
        m2 /= C64::new(n as f64, 0.0);
        assert!(max_abs_diff(&m1, &uniform_first_moment(rho.mat())) < 0.01);
        assert!(max_abs_diff(&m2, &uniform_second_moment(rho.mat())) < 0.01);
    }
}
